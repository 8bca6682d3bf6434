#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rlcg/instances.hpp"
#include "rlcg/matrix.hpp"
#include "rlcg/pricing.hpp"
#include "rlcg/rmp_state.hpp"

namespace rlcg {

inline constexpr std::size_t kColumnFeatures = 9;
inline constexpr std::size_t kConstraintFeatures = 2;

namespace column_feature {
inline constexpr std::size_t kReducedCost = 0;
inline constexpr std::size_t kDegree = 1;
inline constexpr std::size_t kSolutionValue = 2;
inline constexpr std::size_t kWaste = 3;
inline constexpr std::size_t kItersInBasis = 4;
inline constexpr std::size_t kItersOutOfBasis = 5;
inline constexpr std::size_t kLeftBasis = 6;
inline constexpr std::size_t kEnteredBasis = 7;
inline constexpr std::size_t kActionFlag = 8;
}  // namespace column_feature

namespace constraint_feature {
inline constexpr std::size_t kDual = 0;
inline constexpr std::size_t kDegree = 1;
}  // namespace constraint_feature

// Binary column features are not rescaled.
inline constexpr std::array<bool, kColumnFeatures> kBinaryColumnFeature = {
    false, false, false, false, false, false, true, true, true};

struct ColumnNode {
  std::size_t source = 0;  // index into the RMP columns, or into the candidates
  bool candidate = false;
};

struct Edge {
  std::size_t column = 0;
  std::size_t constraint = 0;
  double coefficient = 0.0;
};

// MDP state: RMP columns followed by candidate columns, one node per demand
// row, an edge wherever a pattern cuts at least one piece of that order.
struct BipartiteState {
  std::vector<ColumnNode> column_nodes;
  std::size_t num_constraints = 0;
  std::vector<Edge> edges;  // sorted by (column, constraint)
  Matrix raw_column_features;
  Matrix raw_constraint_features;
  Matrix column_features;      // normalized
  Matrix constraint_features;  // normalized
  std::vector<std::size_t> action_indices;

  std::size_t num_columns() const noexcept { return column_nodes.size(); }
  std::size_t num_actions() const noexcept { return action_indices.size(); }
};

// Raw features from the solved RMP and the pricing candidates, then
// normalized.
BipartiteState build_state(const RmpState& rmp, const CandidateSet& candidates, const Instance& instance);

// Per-dimension min-max over the nodes of this graph; constant dimensions
// become all zeros, binary flags are copied.
void normalize_features(BipartiteState& state);
Matrix min_max_columns(const Matrix& raw, std::span<const bool> passthrough);

nlohmann::json state_to_json(const BipartiteState& state);

}  // namespace rlcg
