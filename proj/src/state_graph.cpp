#include "rlcg/state_graph.hpp"

#include <algorithm>
#include <limits>

namespace rlcg {

namespace {

void fill_column_row(Matrix& raw, std::size_t row, const Pattern& pattern, double reduced_cost,
                     double solution_value, const ColumnDynamics* dynamics, bool action) {
  namespace f = column_feature;
  raw(row, f::kReducedCost) = reduced_cost;
  raw(row, f::kDegree) = pattern.degree();
  raw(row, f::kSolutionValue) = solution_value;
  raw(row, f::kWaste) = pattern.waste;
  if (dynamics != nullptr) {
    raw(row, f::kItersInBasis) = dynamics->iters_in_basis;
    raw(row, f::kItersOutOfBasis) = dynamics->iters_out_of_basis;
    raw(row, f::kLeftBasis) = dynamics->left_last_iter ? 1.0 : 0.0;
    raw(row, f::kEnteredBasis) = dynamics->entered_last_iter ? 1.0 : 0.0;
  }
  raw(row, f::kActionFlag) = action ? 1.0 : 0.0;
}

}  // namespace

BipartiteState build_state(const RmpState& rmp, const CandidateSet& candidates, const Instance& instance) {
  const std::size_t m = instance.num_order_types();
  const std::size_t existing = rmp.columns.size();
  const std::size_t total = existing + candidates.size();
  const auto& duals = rmp.solution.duals;

  BipartiteState s;
  s.num_constraints = m;
  s.column_nodes.reserve(total);
  s.raw_column_features = Matrix(total, kColumnFeatures);
  s.raw_constraint_features = Matrix(m, kConstraintFeatures);

  auto add_node = [&](const Pattern& pattern, std::size_t source, bool candidate) {
    const std::size_t v = s.column_nodes.size();
    s.column_nodes.push_back({source, candidate});
    for (std::size_t c = 0; c < m; ++c) {
      if (pattern.counts[c] <= 0) continue;
      s.edges.push_back({v, c, static_cast<double>(pattern.counts[c])});
      s.raw_constraint_features(c, constraint_feature::kDegree) += 1.0;
    }
    const double rc = 1.0 - pattern_value(duals, pattern.counts);
    if (candidate) {
      fill_column_row(s.raw_column_features, v, pattern, rc, 0.0, nullptr, true);
      s.action_indices.push_back(v);
    } else {
      fill_column_row(s.raw_column_features, v, pattern, rc, rmp.solution.lambda[source], &rmp.dynamics[source],
                      false);
    }
  };
  for (std::size_t p = 0; p < existing; ++p) add_node(rmp.columns[p], p, false);
  for (std::size_t g = 0; g < candidates.size(); ++g) add_node(candidates.patterns[g], g, true);
  for (std::size_t c = 0; c < m; ++c) s.raw_constraint_features(c, constraint_feature::kDual) = duals[c];

  normalize_features(s);
  return s;
}

Matrix min_max_columns(const Matrix& raw, std::span<const bool> passthrough) {
  Matrix out(raw.rows, raw.cols);
  for (std::size_t j = 0; j < raw.cols; ++j) {
    if (j < passthrough.size() && passthrough[j]) {
      for (std::size_t i = 0; i < raw.rows; ++i) out(i, j) = raw(i, j);
      continue;
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < raw.rows; ++i) lo = std::min(lo, raw(i, j)), hi = std::max(hi, raw(i, j));
    const double range = hi - lo;
    for (std::size_t i = 0; i < raw.rows; ++i) {
      // Constant dimensions carry no information within the graph.
      const double x = range > 0.0 ? (raw(i, j) - lo) / range : 0.0;
      out(i, j) = std::clamp(x, 0.0, 1.0);
    }
  }
  return out;
}

void normalize_features(BipartiteState& state) {
  state.column_features = min_max_columns(state.raw_column_features, kBinaryColumnFeature);
  state.constraint_features = min_max_columns(state.raw_constraint_features, {});
}

namespace {

nlohmann::json matrix_json(const Matrix& m) {
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows; ++i) rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
  return rows;
}

}  // namespace

nlohmann::json state_to_json(const BipartiteState& state) {
  nlohmann::json j;
  auto nodes = nlohmann::json::array();
  for (const auto& node : state.column_nodes) nodes.push_back({{"source", node.source}, {"candidate", node.candidate}});
  j["column_nodes"] = std::move(nodes);
  j["num_constraints"] = state.num_constraints;
  auto edges = nlohmann::json::array();
  for (const auto& e : state.edges) edges.push_back({e.column, e.constraint, e.coefficient});
  j["edges"] = std::move(edges);
  j["action_indices"] = state.action_indices;
  j["raw"] = {{"columns", matrix_json(state.raw_column_features)},
              {"constraints", matrix_json(state.raw_constraint_features)}};
  j["normalized"] = {{"columns", matrix_json(state.column_features)},
                     {"constraints", matrix_json(state.constraint_features)}};
  return j;
}

}  // namespace rlcg
