#include "rlcg/cg_engine.hpp"

#include <chrono>

#include "rlcg/csv.hpp"

namespace rlcg {

double step_reward(double obj_initial, double obj_previous, double obj_current, const RewardConfig& cfg) noexcept {
  return cfg.alpha * ((obj_previous - obj_current) / obj_initial) - cfg.step_penalty;
}

std::vector<Pattern> init_columns(const Instance& instance) {
  const std::vector<double> zero(instance.num_order_types(), 0.0);
  std::vector<Pattern> out;
  for (auto& counts : homogeneous_patterns(instance.sizes, instance.roll_length))
    out.push_back(make_pattern(std::move(counts), zero, instance.sizes, instance.roll_length));
  return out;
}

CgEnvironment::CgEnvironment(EnvironmentOptions options) : options_(options) {}

void CgEnvironment::refresh_reduced_costs() {
  for (auto& col : rmp_.columns) col.reduced_cost = 1.0 - pattern_value(rmp_.solution.duals, col.counts);
}

void CgEnvironment::price() {
  candidates_ = kbest_knapsack(rmp_.solution.duals, instance_.sizes, instance_.roll_length, options_.k,
                               options_.tol_rc);
  done_ = candidates_.empty();
  state_.reset();
}

StatePtr CgEnvironment::reset(const Instance& instance) {
  validate(instance);
  instance_ = instance;
  std::vector<double> demands(instance.demands.begin(), instance.demands.end());
  solver_.emplace(std::move(demands), options_.simplex);

  rmp_ = RmpState{};
  rmp_.columns = init_columns(instance);
  for (const auto& col : rmp_.columns) solver_->add_column(col.counts);
  rmp_.solution = solver_->solve_cold();
  if (rmp_.solution.status != LpStatus::Optimal)
    throw EnvironmentError("initial restricted master problem is infeasible");
  rmp_.obj_history.push_back(rmp_.solution.objective);
  rmp_.dynamics.resize(rmp_.columns.size());
  for (std::size_t p = 0; p < rmp_.columns.size(); ++p)
    rmp_.dynamics[p].in_basis = rmp_.solution.lambda[p] > kInBasisThreshold;
  refresh_reduced_costs();
  price();
  return done_ ? nullptr : state();
}

StatePtr CgEnvironment::state() const {
  if (done_) return nullptr;
  if (!state_) state_ = std::make_shared<const BipartiteState>(build_state(rmp_, candidates_, instance_));
  return state_;
}

StepOutcome CgEnvironment::step(std::size_t action_index, const RewardConfig& reward) {
  if (!solver_ || done_) throw EnvironmentError("step called on a finished episode");
  if (action_index >= candidates_.size())
    throw EnvironmentError("action index " + std::to_string(action_index) + " out of range (" +
                           std::to_string(candidates_.size()) + " candidates)");

  Pattern chosen = candidates_.patterns[action_index];
  const double previous = rmp_.obj_history.back();
  solver_->add_column(chosen.counts);
  rmp_.solution = solver_->solve();
  if (rmp_.solution.status != LpStatus::Optimal) throw EnvironmentError("RMP became infeasible");
  ++rmp_.iteration;
  const int t = rmp_.iteration;

  rmp_.columns.push_back(std::move(chosen));
  rmp_.dynamics.push_back(ColumnDynamics{.added_iteration = t});
  for (std::size_t p = 0; p < rmp_.columns.size(); ++p) {
    auto& dyn = rmp_.dynamics[p];
    const bool now = rmp_.solution.lambda[p] > kInBasisThreshold;
    dyn.entered_last_iter = now && !dyn.in_basis;
    dyn.left_last_iter = !now && dyn.in_basis;
    dyn.in_basis = now;
    if (dyn.added_iteration < t) {
      if (now) ++dyn.iters_in_basis;
      else ++dyn.iters_out_of_basis;
    }
  }
  rmp_.obj_history.push_back(rmp_.solution.objective);
  refresh_reduced_costs();
  price();

  StepOutcome out;
  out.reward = step_reward(rmp_.obj_history.front(), previous, rmp_.solution.objective, reward);
  out.done = done_;
  out.objective = rmp_.solution.objective;
  out.num_candidates = candidates_.size();
  if (!done_) out.next_state = state();
  return out;
}

CgRun run_cg(const Instance& instance, ColumnSelector& policy, const CgLimits& limits,
             const EnvironmentOptions& options) {
  if (limits.max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  const auto start = std::chrono::steady_clock::now();
  CgEnvironment env(options);
  env.reset(instance);
  CgRun run;
  while (!env.done() && run.iterations < limits.max_iters) {
    env.step(policy.select(env));
    ++run.iterations;
  }
  run.converged = env.done();
  run.objective = env.rmp().solution.objective;
  run.trajectory = env.rmp().obj_history;
  run.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

std::vector<double> normalize_trajectory(const std::vector<double>& trajectory) {
  std::vector<double> out(trajectory.size(), 0.0);
  if (trajectory.empty()) return out;
  const double first = trajectory.front();
  const double last = trajectory.back();
  const double range = first - last;
  if (!(range > 0.0)) return out;
  for (std::size_t t = 0; t < trajectory.size(); ++t) out[t] = (trajectory[t] - last) / range;
  out.front() = 1.0;
  out.back() = 0.0;
  return out;
}

void write_trajectory_csv(std::ostream& out, const std::vector<double>& trajectory) {
  const auto normalized = normalize_trajectory(trajectory);
  CsvWriter csv(out, {"iteration", "objective", "normalized_objective"});
  for (std::size_t t = 0; t < trajectory.size(); ++t)
    csv.row(static_cast<long long>(t), trajectory[t], normalized[t]);
}

}  // namespace rlcg
