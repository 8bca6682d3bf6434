#include <doctest.h>

#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "rlcg/agent.hpp"
#include "rlcg/policies.hpp"

using namespace rlcg;

namespace {

Transition marker(double reward) {
  Transition t;
  t.reward = reward;
  t.done = true;
  return t;
}

// Upper-tail chi-square critical value at p = 0.001 for 9 degrees of freedom.
constexpr double kChi2Crit9 = 27.877;

HyperParams small_hyper() {
  HyperParams h;
  h.hidden = 8;
  h.rounds = 1;
  h.batch_size = 4;
  return h;
}

}  // namespace

TEST_CASE("FIFO eviction") {
  ReplayBuffer b(2);
  b.push(marker(1));
  b.push(marker(2));
  b.push(marker(3));
  const auto c = b.contents();
  REQUIRE(c.size() == 2);
  CHECK(c[0].reward == 2);
  CHECK(c[1].reward == 3);
  CHECK(b.size() <= b.capacity());
  CHECK_THROWS(ReplayBuffer(0));
}

TEST_CASE("done flag must match the successor") {
  ReplayBuffer b(4);
  Transition t = marker(0);
  t.done = false;
  CHECK_THROWS(b.push(t));
}

TEST_CASE("sampling is uniform with replacement") {
  ReplayBuffer b(10);
  for (int i = 0; i < 10; ++i) b.push(marker(i));
  SplitMix64 rng(123);
  CHECK(b.sample(25, rng).size() == 25);
  std::vector<double> counts(10, 0.0);
  const int draws = 100000;
  for (const auto& t : b.sample(draws, rng)) counts[static_cast<std::size_t>(t.reward)] += 1;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - draws / 10.0) * (c - draws / 10.0) / (draws / 10.0);
  CHECK(chi2 < kChi2Crit9);
  ReplayBuffer empty(3);
  CHECK_THROWS(empty.sample(1, rng));
}

TEST_CASE("epsilon-greedy") {
  SplitMix64 rng(7);
  const auto s = [&] {
    for (;;) {
      auto st = fixture::random_state(rng);
      if (st->num_actions() >= 4) return st;
    }
  }();
  const auto params = init_network(8, 1, 1);
  const auto q = forward(params, *s);
  const std::size_t best = argmax_first(q);
  for (int i = 0; i < 50; ++i) CHECK(epsilon_greedy_select(params, *s, 0.0, rng) == best);

  const std::size_t n = s->num_actions();
  std::vector<double> counts(n, 0.0);
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) counts[epsilon_greedy_select(params, *s, 1.0, rng)] += 1;
  double chi2 = 0.0;
  const double e = static_cast<double>(draws) / static_cast<double>(n);
  for (double c : counts) chi2 += (c - e) * (c - e) / e;
  // Generous bound: p = 0.001 critical value for up to 9 degrees of freedom.
  CHECK(chi2 < kChi2Crit9);

  BipartiteState single = *s;
  single.action_indices.resize(1);
  const std::uint64_t before = rng.state();
  CHECK(epsilon_greedy_select(params, single, 1.0, rng) == 0);
  CHECK(rng.state() == before);
}

TEST_CASE("terminal targets never bootstrap") {
  DqnTrainer trainer(small_hyper(), 0);
  Transition t = marker(-1.0);
  CHECK(trainer.target(t) == -1.0);
  CHECK(trainer.bootstrapped_targets() == 0);
  SplitMix64 rng(1);
  t.done = false;
  t.next_state = fixture::random_state(rng);
  const auto q = forward(trainer.params(), *t.next_state);
  CHECK(trainer.target(t) == doctest::Approx(-1.0 + 0.9 * *std::max_element(q.begin(), q.end())));
  CHECK(trainer.bootstrapped_targets() == 1);
}

TEST_CASE("episode reward telescopes and losses are finite") {
  HyperParams h = small_hyper();
  DqnTrainer trainer(h, 5);
  SplitMix64 rng(8);
  for (int e = 0; e < 8; ++e) {
    const Instance inst = generate_instance(static_cast<int>(rng.uniform_int(15, 30)), 15, 0.1, 0.7, rng.next());
    const EpisodeResult r = trainer.train_episode(inst);
    const double expected = h.alpha * (r.initial_objective - r.final_objective) / r.initial_objective - r.iterations;
    CHECK(std::abs(r.total_reward - expected) <= 1e-9);
    for (double l : r.losses) CHECK(std::isfinite(l));
    CHECK(trainer.buffer().size() <= h.replay_capacity);
  }
  CHECK(trainer.gradient_steps() > 0);
}

TEST_CASE("updates per step multiplies Adam steps once the buffer is warm") {
  HyperParams h = small_hyper();
  h.updates_per_step = 3;
  DqnTrainer trainer(h, 6);
  const EpisodeResult r = trainer.train_episode(generate_instance(25, 15, 0.1, 0.7, 99));
  const auto warm_steps = static_cast<std::size_t>(std::max(0, r.iterations - static_cast<int>(h.batch_size) + 1));
  REQUIRE(warm_steps > 0);
  CHECK(trainer.gradient_steps() == 3 * warm_steps);
  CHECK(r.losses.size() == 3 * warm_steps);
  h.updates_per_step = 0;
  CHECK_THROWS_AS(validate(h), std::invalid_argument);
}

TEST_CASE("one-order-type episode takes at most one step") {
  DqnTrainer trainer(small_hyper(), 1);
  const EpisodeResult r = trainer.train_episode(Instance{"one", 10, {3}, {5}});
  CHECK(r.iterations <= 1);
  CHECK(trainer.buffer().size() <= 1);
}

TEST_CASE("validation cadence and determinism") {
  HyperParams h = small_hyper();
  std::vector<Instance> curriculum;
  for (int i = 0; i < 60; ++i) curriculum.push_back(generate_instance(12, 6, 0.2, 0.6, static_cast<std::uint64_t>(i)));
  const std::vector<Instance> val = {generate_instance(14, 6, 0.2, 0.6, 99)};
  const TrainingResult a = train_curriculum(curriculum, h, val, 3);
  REQUIRE(a.validation_log.size() == 3);
  CHECK(a.validation_log[0].episode == 20);
  CHECK(a.validation_log[2].episode == 60);
  CHECK(a.training_log.size() == 60);
  const TrainingResult b = train_curriculum(curriculum, h, val, 3);
  CHECK(a.params == b.params);
  for (std::size_t i = 0; i < 60; ++i) {
    CHECK(a.training_log[i].iterations == b.training_log[i].iterations);
    CHECK(a.training_log[i].total_reward == b.training_log[i].total_reward);
  }
  const TrainingResult c = train_curriculum(curriculum, h, {}, 3);
  CHECK(c.validation_log.empty());
  CHECK(c.params == a.params);
}

TEST_CASE("episode cap") {
  std::vector<Instance> curriculum(5, generate_instance(12, 6, 0.2, 0.6, 1));
  TrainingOptions opts;
  opts.max_episodes = 0;
  const TrainingResult r = train_curriculum(curriculum, small_hyper(), {}, 4, opts);
  CHECK(r.training_log.empty());
  CHECK(r.params == DqnTrainer(small_hyper(), 4).params());
}

TEST_CASE("ratio helpers") {
  CHECK(iteration_ratio(10, 8) == 1.25);
  CHECK(iteration_ratio(0, 0) == 1.0);
  const RatioSummary s = summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == 2.5);
  CHECK(s.median == 2.5);
  CHECK(s.std == doctest::Approx(std::sqrt(1.25)));
}

TEST_CASE("stage trend slopes") {
  std::vector<EpisodeLog> log;
  for (int i = 0; i < 6; ++i) log.push_back({i + 1, "x", i < 3 ? 10 - i : 5 + 2 * (i - 3), 0, 0});
  const auto slopes = stage_trend_slopes(log, {3, 3});
  REQUIRE(slopes.size() == 2);
  CHECK(slopes[0] == doctest::Approx(-1.0));
  CHECK(slopes[1] == doctest::Approx(2.0));
}

TEST_CASE("sweep grid") {
  const SweepGrid g = default_grid();
  const auto all = enumerate_grid(g);
  CHECK(all.size() == 81);
  CHECK(all.front() == SweepConfig{0.0, 0.01, 0.9, 0.01});
  CHECK(all[1] == SweepConfig{0.0, 0.01, 0.9, 1e-3});
  const auto picked = sample_configs(g, 31, 0);
  CHECK(picked.size() == 31);
  std::set<std::tuple<double, double, double, double>> distinct;
  for (const auto& c : picked) distinct.insert({c.alpha, c.epsilon, c.gamma, c.lr});
  CHECK(distinct.size() == 31);
  CHECK(sample_configs(g, 31, 0) == picked);
  CHECK(sample_configs(g, 81, 5).size() == 81);
  CHECK_THROWS(sample_configs(g, 82, 0));
  CHECK_THROWS(sample_configs(SweepGrid{}, 1, 0));
}

TEST_CASE("sweep ranks finite ratios") {
  SweepGrid g{{0.0, 300.0}, {0.05}, {0.9}, {1e-3}};
  const std::vector<Instance> cur = {generate_instance(12, 6, 0.2, 0.6, 1), generate_instance(12, 6, 0.2, 0.6, 2)};
  const std::vector<Instance> val = {generate_instance(14, 6, 0.2, 0.6, 3)};
  HyperParams base = small_hyper();
  SweepOptions opts;
  opts.training.max_episodes = 0;
  const auto results = hyperparameter_sweep(g, 2, cur, val, base, 1, opts);
  REQUIRE(results.size() == 2);
  for (const auto& r : results) CHECK(std::isfinite(r.mean_ratio));
  CHECK(results[0].mean_ratio >= results[1].mean_ratio);
}
