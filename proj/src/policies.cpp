#include "rlcg/policies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rlcg {

PolicyKind parse_policy_kind(std::string_view name) {
  if (name == "greedy") return PolicyKind::Greedy;
  if (name == "expert") return PolicyKind::Expert;
  if (name == "rl") return PolicyKind::Rl;
  throw std::invalid_argument("unknown policy '" + std::string(name) + "' (expected greedy, expert or rl)");
}

std::string_view to_string(PolicyKind kind) noexcept {
  switch (kind) {
    case PolicyKind::Greedy: return "greedy";
    case PolicyKind::Expert: return "expert";
    case PolicyKind::Rl: return "rl";
  }
  return "?";
}

std::size_t greedy_select(const CandidateSet& candidates) {
  if (candidates.empty()) throw std::invalid_argument("greedy selection from an empty candidate set");
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i)
    if (candidates.patterns[i].reduced_cost < candidates.patterns[best].reduced_cost) best = i;
  return best;
}

std::vector<double> lookahead_objectives(const RmpSolver& solver, const CandidateSet& candidates) {
  std::vector<double> out;
  out.reserve(candidates.size());
  for (const auto& pattern : candidates.patterns) {
    RmpSolver trial = solver;
    trial.add_column(pattern.counts);
    const auto& sol = trial.solve();
    if (sol.status != LpStatus::Optimal) throw std::runtime_error("lookahead solve failed");
    out.push_back(sol.objective);
  }
  return out;
}

std::size_t expert_select(const RmpSolver& solver, const CandidateSet& candidates) {
  if (candidates.empty()) throw std::invalid_argument("expert selection from an empty candidate set");
  if (candidates.size() == 1) return 0;
  const auto objectives = lookahead_objectives(solver, candidates);
  const double best = *std::min_element(objectives.begin(), objectives.end());
  const double tol = kExpertTieTolerance * std::max(1.0, std::abs(best));
  for (std::size_t i = 0; i < objectives.size(); ++i)
    if (objectives[i] <= best + tol) return i;
  return 0;
}

std::size_t argmax_first(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

std::size_t rl_select(const QNetworkParams& params, const BipartiteState& state) {
  if (state.action_indices.empty()) throw std::invalid_argument("state has no action nodes");
  return argmax_first(forward(params, state));
}

RlPolicy::RlPolicy(QNetworkParams params) : params_(std::move(params)) { check_shape(params_); }

std::size_t RlPolicy::select(const CgEnvironment& env) { return rl_select(params_, *env.state()); }

std::unique_ptr<ColumnSelector> make_policy(PolicyKind kind, const QNetworkParams* params) {
  switch (kind) {
    case PolicyKind::Greedy: return std::make_unique<GreedyPolicy>();
    case PolicyKind::Expert: return std::make_unique<ExpertPolicy>();
    case PolicyKind::Rl:
      if (params == nullptr) throw std::invalid_argument("the rl policy needs network parameters");
      return std::make_unique<RlPolicy>(*params);
  }
  throw std::invalid_argument("unknown policy kind");
}

}  // namespace rlcg
