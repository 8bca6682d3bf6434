#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rlcg/cg_engine.hpp"
#include "rlcg/qnet.hpp"

namespace rlcg {

enum class PolicyKind { Greedy, Expert, Rl };

PolicyKind parse_policy_kind(std::string_view name);  // "greedy" | "expert" | "rl"
std::string_view to_string(PolicyKind kind) noexcept;

// Index of the most negative reduced cost; first on ties.
std::size_t greedy_select(const CandidateSet& candidates);

// RMP objective after tentatively adding each candidate (warm-started copies
// of the current solver).
std::vector<double> lookahead_objectives(const RmpSolver& solver, const CandidateSet& candidates);

// Candidate with the lowest next objective. Objectives within
// kExpertTieTolerance of the minimum count as tied and the tie goes to the
// lowest index, i.e. the most negative reduced cost.
std::size_t expert_select(const RmpSolver& solver, const CandidateSet& candidates);
inline constexpr double kExpertTieTolerance = 1e-9;

// argmax_a Q(s, a), first on ties.
std::size_t argmax_first(std::span<const double> values);
std::size_t rl_select(const QNetworkParams& params, const BipartiteState& state);

class GreedyPolicy final : public ColumnSelector {
 public:
  std::size_t select(const CgEnvironment& env) override { return greedy_select(env.candidates()); }
  std::string_view name() const noexcept override { return "greedy"; }
};

class ExpertPolicy final : public ColumnSelector {
 public:
  std::size_t select(const CgEnvironment& env) override { return expert_select(env.solver(), env.candidates()); }
  std::string_view name() const noexcept override { return "expert"; }
};

class RlPolicy final : public ColumnSelector {
 public:
  explicit RlPolicy(QNetworkParams params);
  std::size_t select(const CgEnvironment& env) override;
  std::string_view name() const noexcept override { return "rl"; }
  const QNetworkParams& params() const noexcept { return params_; }

 private:
  QNetworkParams params_;
};

// params is required for PolicyKind::Rl and ignored otherwise.
std::unique_ptr<ColumnSelector> make_policy(PolicyKind kind, const QNetworkParams* params = nullptr);

}  // namespace rlcg
