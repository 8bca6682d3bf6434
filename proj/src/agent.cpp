#include "rlcg/agent.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "rlcg/policies.hpp"

namespace rlcg {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("replay capacity must be at least 1");
  items_.reserve(std::min<std::size_t>(capacity, 4096));
}

void ReplayBuffer::push(Transition t) {
  if (t.done != (t.next_state == nullptr)) throw std::invalid_argument("transition done flag disagrees with next state");
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
    return;
  }
  items_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, SplitMix64& rng) const {
  if (items_.empty()) throw std::logic_error("sampling from an empty replay buffer");
  std::vector<Transition> out;
  out.reserve(n);
  const auto last = static_cast<std::int64_t>(items_.size()) - 1;
  for (std::size_t i = 0; i < n; ++i) out.push_back(items_[static_cast<std::size_t>(rng.uniform_int(0, last))]);
  return out;
}

std::vector<Transition> ReplayBuffer::contents() const {
  std::vector<Transition> out;
  out.reserve(items_.size());
  for (std::size_t i = 0; i < items_.size(); ++i) out.push_back(items_[(head_ + i) % items_.size()]);
  return out;
}

std::size_t epsilon_greedy_select(const QNetworkParams& params, const BipartiteState& state, double epsilon,
                                  SplitMix64& rng) {
  const std::size_t n = state.num_actions();
  if (n == 0) throw std::invalid_argument("state has no action nodes");
  if (n == 1) return 0;
  if (rng.uniform01() < epsilon) return static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
  return argmax_first(forward(params, state));
}

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 mix(seed ^ (0xA0761D6478BD642FULL * (stream + 1)));
  return mix.next();
}

EnvironmentOptions env_options(const HyperParams& hyper) {
  EnvironmentOptions opts;
  opts.k = hyper.k_candidates;
  return opts;
}

}  // namespace

DqnTrainer::DqnTrainer(const HyperParams& hyper, std::uint64_t seed)
    : DqnTrainer(hyper, init_network(hyper.hidden, hyper.rounds, derive_seed(seed, 0)), seed) {}

DqnTrainer::DqnTrainer(const HyperParams& hyper, QNetworkParams params, std::uint64_t seed)
    : hyper_(hyper), params_(std::move(params)), buffer_(hyper.replay_capacity), rng_(derive_seed(seed, 1)) {
  validate(hyper_);
  check_shape(params_);
  if (params_.shape != NetShape{hyper_.hidden, hyper_.rounds})
    throw ShapeError("network shape disagrees with hyperparameters");
  if (hyper_.target_sync_every > 0) frozen_ = params_;
}

double DqnTrainer::target(const Transition& t) const {
  if (t.done) return t.reward;
  ++bootstrapped_targets_;
  const auto q = forward(frozen_ ? *frozen_ : params_, *t.next_state);
  return t.reward + hyper_.gamma * *std::max_element(q.begin(), q.end());
}

double DqnTrainer::learn() {
  const auto batch = buffer_.sample(hyper_.batch_size, rng_);
  std::vector<QSample> samples;
  samples.reserve(batch.size());
  for (const auto& t : batch) samples.push_back({t.state.get(), t.action, target(t)});
  const auto lg = loss_and_grad(params_, samples);
  adam_step(params_, lg.gradient, hyper_.lr);
  ++gradient_steps_;
  if (frozen_ && gradient_steps_ % hyper_.target_sync_every == 0) frozen_ = params_;
  return lg.loss;
}

EpisodeResult DqnTrainer::train_episode(const Instance& instance) {
  CgEnvironment env(env_options(hyper_));
  StatePtr state = env.reset(instance);
  EpisodeResult result;
  result.initial_objective = env.rmp().obj_history.front();
  const RewardConfig reward{hyper_.alpha, 1.0};
  while (state && result.iterations < hyper_.max_iters) {
    const std::size_t action = epsilon_greedy_select(params_, *state, hyper_.epsilon, rng_);
    StepOutcome out = env.step(action, reward);
    result.total_reward += out.reward;
    ++result.iterations;
    buffer_.push({state, action, out.reward, out.next_state, out.done});
    if (buffer_.size() >= hyper_.batch_size)
      for (std::size_t u = 0; u < hyper_.updates_per_step; ++u) result.losses.push_back(learn());
    state = out.next_state;
  }
  result.converged = env.done();
  result.final_objective = env.rmp().solution.objective;
  return result;
}

double iteration_ratio(int greedy_iterations, int rl_iterations) noexcept {
  if (rl_iterations <= 0) return greedy_iterations <= 0 ? 1.0 : static_cast<double>(greedy_iterations);
  return static_cast<double>(greedy_iterations) / static_cast<double>(rl_iterations);
}

RatioSummary summarize(std::vector<double> values) {
  RatioSummary s;
  s.ratios = values;
  if (values.empty()) return s;
  const auto n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / n);
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  s.median = values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
  return s;
}

std::vector<int> greedy_iterations(const std::vector<Instance>& instances, const HyperParams& hyper) {
  std::vector<int> out;
  GreedyPolicy greedy;
  for (const auto& inst : instances) out.push_back(run_cg(inst, greedy, {hyper.max_iters}, env_options(hyper)).iterations);
  return out;
}

RatioSummary validate_ratios(const QNetworkParams& params, const std::vector<Instance>& validation,
                             const std::vector<int>& greedy_iters, const HyperParams& hyper) {
  RlPolicy policy(params);
  std::vector<double> ratios;
  double rl_total = 0.0;
  for (std::size_t i = 0; i < validation.size(); ++i) {
    const int rl = run_cg(validation[i], policy, {hyper.max_iters}, env_options(hyper)).iterations;
    rl_total += rl;
    ratios.push_back(iteration_ratio(greedy_iters[i], rl));
  }
  RatioSummary s = summarize(std::move(ratios));
  if (!validation.empty()) s.mean_rl_iterations = rl_total / static_cast<double>(validation.size());
  return s;
}

TrainingResult train_curriculum(const std::vector<Instance>& curriculum, const HyperParams& hyper,
                                const std::vector<Instance>& validation, std::uint64_t seed,
                                const TrainingOptions& options) {
  validate(hyper);
  DqnTrainer trainer(hyper, seed);
  TrainingResult result;
  const std::vector<int> greedy = greedy_iterations(validation, hyper);
  const std::size_t episodes =
      options.max_episodes < 0 ? curriculum.size()
                               : std::min(curriculum.size(), static_cast<std::size_t>(options.max_episodes));
  for (std::size_t e = 0; e < episodes; ++e) {
    const EpisodeResult ep = trainer.train_episode(curriculum[e]);
    EpisodeLog log;
    log.episode = static_cast<int>(e + 1);
    log.instance_name = curriculum[e].name;
    log.iterations = ep.iterations;
    log.total_reward = ep.total_reward;
    if (!ep.losses.empty())
      log.mean_loss = std::accumulate(ep.losses.begin(), ep.losses.end(), 0.0) / static_cast<double>(ep.losses.size());
    result.training_log.push_back(log);
    if (options.on_episode) options.on_episode(log);
    if (!validation.empty() && options.validate_every > 0 && (e + 1) % static_cast<std::size_t>(options.validate_every) == 0) {
      const RatioSummary s = validate_ratios(trainer.params(), validation, greedy, hyper);
      result.validation_log.push_back({log.episode, s.mean, s.std, s.mean_rl_iterations});
    }
  }
  result.params = trainer.params();
  return result;
}

std::vector<double> stage_trend_slopes(const std::vector<EpisodeLog>& log, const std::vector<int>& stage_sizes) {
  std::vector<double> slopes;
  std::size_t start = 0;
  for (int size : stage_sizes) {
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(size), log.size() - std::min(start, log.size()));
    if (n < 2) {
      slopes.push_back(0.0);
      start += static_cast<std::size_t>(size);
      continue;
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) mx += static_cast<double>(i), my += log[start + i].iterations;
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = static_cast<double>(i) - mx;
      sxy += dx * (log[start + i].iterations - my);
      sxx += dx * dx;
    }
    slopes.push_back(sxy / sxx);
    start += static_cast<std::size_t>(size);
  }
  return slopes;
}

SweepGrid default_grid() {
  return {{0.0, 100.0, 300.0}, {0.01, 0.05, 0.2}, {0.9, 0.95, 0.99}, {0.01, 1e-3, 3e-4}};
}

std::vector<SweepConfig> enumerate_grid(const SweepGrid& grid) {
  std::vector<SweepConfig> out;
  out.reserve(grid.size());
  for (double a : grid.alphas)
    for (double e : grid.epsilons)
      for (double g : grid.gammas)
        for (double lr : grid.lrs) out.push_back({a, e, g, lr});
  return out;
}

std::vector<SweepConfig> sample_configs(const SweepGrid& grid, std::size_t n, std::uint64_t seed) {
  auto all = enumerate_grid(grid);
  if (all.empty()) throw std::invalid_argument("hyperparameter grid is empty");
  if (n > all.size())
    throw std::invalid_argument("cannot sample " + std::to_string(n) + " configurations from a grid of " +
                                std::to_string(all.size()));
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(i),
                                                            static_cast<std::int64_t>(all.size()) - 1));
    std::swap(all[i], all[j]);
  }
  all.resize(n);
  return all;
}

std::vector<SweepResult> hyperparameter_sweep(const SweepGrid& grid, std::size_t n_samples,
                                              const std::vector<Instance>& curriculum,
                                              const std::vector<Instance>& validation, const HyperParams& base,
                                              std::uint64_t seed, const SweepOptions& options) {
  const auto configs = sample_configs(grid, n_samples, seed);
  std::vector<SweepResult> results(configs.size());
  std::vector<int> greedy;
  {
    HyperParams h = base;
    greedy = greedy_iterations(validation, h);
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < configs.size();) {
      try {
        HyperParams h = base;
        h.alpha = configs[i].alpha;
        h.epsilon = configs[i].epsilon;
        h.gamma = configs[i].gamma;
        h.lr = configs[i].lr;
        TrainingOptions topts = options.training;
        topts.validate_every = 0;
        topts.on_episode = nullptr;
        const TrainingResult trained = train_curriculum(curriculum, h, {}, seed, topts);
        const RatioSummary s = validate_ratios(trained.params, validation, greedy, h);
        results[i] = {i, configs[i], s.mean, s.median, s.std};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, configs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  std::stable_sort(results.begin(), results.end(),
                   [](const SweepResult& a, const SweepResult& b) { return a.mean_ratio > b.mean_ratio; });
  return results;
}

}  // namespace rlcg
