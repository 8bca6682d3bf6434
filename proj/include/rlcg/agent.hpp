#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rlcg/cg_engine.hpp"
#include "rlcg/hyper.hpp"
#include "rlcg/instances.hpp"
#include "rlcg/qnet.hpp"
#include "rlcg/rng.hpp"

namespace rlcg {

struct Transition {
  StatePtr state;
  std::size_t action = 0;
  double reward = 0.0;
  StatePtr next_state;  // null exactly when done
  bool done = false;
};

// Fixed-capacity FIFO of transitions.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  // n uniform draws with replacement.
  std::vector<Transition> sample(std::size_t n, SplitMix64& rng) const;

  std::size_t size() const noexcept { return items_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  // Oldest first.
  std::vector<Transition> contents() const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // slot that the next push overwrites once full
  std::vector<Transition> items_;
};

// With probability epsilon a uniformly random action, otherwise argmax Q
// (first on ties). A single action is returned without drawing.
std::size_t epsilon_greedy_select(const QNetworkParams& params, const BipartiteState& state, double epsilon,
                                  SplitMix64& rng);

struct EpisodeResult {
  int iterations = 0;
  double total_reward = 0.0;
  std::vector<double> losses;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  bool converged = false;
};

// DQN learner state: online network, optional frozen target copy, replay
// buffer and the PRNG driving exploration and minibatch sampling.
class DqnTrainer {
 public:
  DqnTrainer(const HyperParams& hyper, std::uint64_t seed);
  DqnTrainer(const HyperParams& hyper, QNetworkParams params, std::uint64_t seed);

  EpisodeResult train_episode(const Instance& instance);

  // y = r for terminal transitions, r + gamma * max_a' Q(s', a') otherwise.
  double target(const Transition& t) const;

  const QNetworkParams& params() const noexcept { return params_; }
  const HyperParams& hyper() const noexcept { return hyper_; }
  const ReplayBuffer& buffer() const noexcept { return buffer_; }
  std::size_t gradient_steps() const noexcept { return gradient_steps_; }
  // Counts target computations that evaluated a successor state.
  std::size_t bootstrapped_targets() const noexcept { return bootstrapped_targets_; }

 private:
  double learn();

  HyperParams hyper_;
  QNetworkParams params_;
  std::optional<QNetworkParams> frozen_;
  ReplayBuffer buffer_;
  SplitMix64 rng_;
  std::size_t gradient_steps_ = 0;
  mutable std::size_t bootstrapped_targets_ = 0;
};

struct EpisodeLog {
  int episode = 0;  // 1-based
  std::string instance_name;
  int iterations = 0;
  double total_reward = 0.0;
  double mean_loss = 0.0;  // 0 when no gradient step was taken
};

struct ValidationRecord {
  int episode = 0;
  double mean_ratio = 0.0;
  double std_ratio = 0.0;
  double mean_rl_iterations = 0.0;
};

struct TrainingResult {
  QNetworkParams params;
  std::vector<EpisodeLog> training_log;
  std::vector<ValidationRecord> validation_log;
};

struct TrainingOptions {
  int validate_every = 20;
  // Caps the number of curriculum episodes; negative means all.
  int max_episodes = -1;
  std::function<void(const EpisodeLog&)> on_episode;
};

// greedy_iterations / rl_iterations; 1 when both are zero.
double iteration_ratio(int greedy_iterations, int rl_iterations) noexcept;

struct RatioSummary {
  std::vector<double> ratios;
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;  // population standard deviation
  double mean_rl_iterations = 0.0;
};

RatioSummary summarize(std::vector<double> values);

// Evaluates params greedily (epsilon = 0) against precomputed greedy
// iteration counts.
RatioSummary validate_ratios(const QNetworkParams& params, const std::vector<Instance>& validation,
                             const std::vector<int>& greedy_iterations, const HyperParams& hyper);
std::vector<int> greedy_iterations(const std::vector<Instance>& instances, const HyperParams& hyper);

// One episode per curriculum instance, in order; every validate_every
// episodes the current network is validated.
TrainingResult train_curriculum(const std::vector<Instance>& curriculum, const HyperParams& hyper,
                                const std::vector<Instance>& validation, std::uint64_t seed,
                                const TrainingOptions& options = {});

// Least-squares slope of iterations against episode number within each
// consecutive block of the given sizes.
std::vector<double> stage_trend_slopes(const std::vector<EpisodeLog>& log, const std::vector<int>& stage_sizes);

struct SweepGrid {
  std::vector<double> alphas;
  std::vector<double> epsilons;
  std::vector<double> gammas;
  std::vector<double> lrs;

  std::size_t size() const noexcept { return alphas.size() * epsilons.size() * gammas.size() * lrs.size(); }
};

SweepGrid default_grid();

struct SweepConfig {
  double alpha = 0.0;
  double epsilon = 0.0;
  double gamma = 0.0;
  double lr = 0.0;
  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

// Cartesian product, alpha outermost and lr innermost.
std::vector<SweepConfig> enumerate_grid(const SweepGrid& grid);
// n configurations without replacement (partial Fisher-Yates on SplitMix64).
std::vector<SweepConfig> sample_configs(const SweepGrid& grid, std::size_t n, std::uint64_t seed);

struct SweepResult {
  std::size_t sample_index = 0;
  SweepConfig config;
  double mean_ratio = 0.0;
  double median_ratio = 0.0;
  double std_ratio = 0.0;
};

struct SweepOptions {
  TrainingOptions training;
  std::size_t threads = 1;
};

// Trains one agent per sampled configuration and ranks by mean validation
// ratio, best first (ties keep sampling order).
std::vector<SweepResult> hyperparameter_sweep(const SweepGrid& grid, std::size_t n_samples,
                                              const std::vector<Instance>& curriculum,
                                              const std::vector<Instance>& validation, const HyperParams& base,
                                              std::uint64_t seed, const SweepOptions& options = {});

}  // namespace rlcg
