#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "rlcg/instances.hpp"
#include "rlcg/pricing.hpp"
#include "rlcg/rmp_state.hpp"
#include "rlcg/simplex.hpp"
#include "rlcg/state_graph.hpp"

namespace rlcg {

struct RewardConfig {
  double alpha = 300.0;
  double step_penalty = 1.0;
};

// r_t = alpha * (obj_{t-1} - obj_t) / obj_0 - step_penalty
double step_reward(double obj_initial, double obj_previous, double obj_current, const RewardConfig& cfg) noexcept;

struct EnvironmentOptions {
  std::size_t k = kDefaultPoolSize;
  double tol_rc = kDefaultReducedCostTol;
  SimplexOptions simplex;
};

using StatePtr = std::shared_ptr<const BipartiteState>;

struct StepOutcome {
  double reward = 0.0;
  bool done = false;
  StatePtr next_state;  // null exactly when done
  double objective = 0.0;
  std::size_t num_candidates = 0;
};

class EnvironmentError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Column generation for one cutting stock instance, exposed as an MDP.
// reset() seeds the RMP with homogeneous patterns; every step() adds one
// pricing candidate, re-solves (warm), prices again and reports the reward.
class CgEnvironment {
 public:
  explicit CgEnvironment(EnvironmentOptions options = {});

  // Returns the initial state, or null when the initial RMP is already optimal.
  StatePtr reset(const Instance& instance);
  StepOutcome step(std::size_t action_index, const RewardConfig& reward = {});

  bool done() const noexcept { return done_; }
  const Instance& instance() const noexcept { return instance_; }
  const RmpState& rmp() const noexcept { return rmp_; }
  const CandidateSet& candidates() const noexcept { return candidates_; }
  const RmpSolver& solver() const { return *solver_; }
  const EnvironmentOptions& options() const noexcept { return options_; }
  // Built on first use after each transition.
  StatePtr state() const;

 private:
  void price();
  void refresh_reduced_costs();

  EnvironmentOptions options_;
  Instance instance_;
  std::optional<RmpSolver> solver_;
  RmpState rmp_;
  CandidateSet candidates_;
  bool done_ = true;
  mutable StatePtr state_;
};

// The homogeneous starting columns floor(L / a_i) * e_i.
std::vector<Pattern> init_columns(const Instance& instance);

// Chooses one candidate index given the environment at a non-terminal state.
class ColumnSelector {
 public:
  virtual ~ColumnSelector() = default;
  virtual std::size_t select(const CgEnvironment& env) = 0;
  virtual std::string_view name() const noexcept = 0;
};

struct CgLimits {
  int max_iters = 1000;
};

struct CgRun {
  int iterations = 0;  // columns added
  double objective = 0.0;
  std::vector<double> trajectory;  // obj_0 .. obj_T
  double wall_time_seconds = 0.0;
  bool converged = false;
};

CgRun run_cg(const Instance& instance, ColumnSelector& policy, const CgLimits& limits = {},
             const EnvironmentOptions& options = {});

// Maps obj_0 -> 1 and obj_T -> 0. A flat trajectory maps to all zeros.
std::vector<double> normalize_trajectory(const std::vector<double>& trajectory);

// "# rlcg-csv v1" then iteration,objective,normalized_objective.
void write_trajectory_csv(std::ostream& out, const std::vector<double>& trajectory);

}  // namespace rlcg
