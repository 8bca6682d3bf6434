#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "rlcg/cg_engine.hpp"
#include "rlcg/csv.hpp"
#include "rlcg/policies.hpp"

using namespace rlcg;

namespace {

double full_enumeration_optimum(const Instance& inst) {
  std::vector<std::vector<int>> cols;
  for (auto& x : oracle::all_patterns(inst.sizes, inst.roll_length)) {
    bool zero = std::all_of(x.begin(), x.end(), [](int v) { return v == 0; });
    if (!zero) cols.push_back(std::move(x));
  }
  const LpSolution sol = solve_rmp(cols, inst.demands);
  REQUIRE(sol.status == LpStatus::Optimal);
  // Independent certificate that this really is the optimum over all patterns.
  const auto cert = oracle::certify(cols, sol.lambda, sol.duals, inst.demands, cols);
  REQUIRE(cert.min_reduced_cost >= -1e-9);
  REQUIRE(cert.duality_gap <= 1e-9);
  return sol.objective;
}

class RandomSelector : public ColumnSelector {
 public:
  explicit RandomSelector(std::uint64_t seed) : rng_(seed) {}
  std::size_t select(const CgEnvironment& env) override {
    return static_cast<std::size_t>(rng_.uniform_int(0, static_cast<std::int64_t>(env.candidates().size()) - 1));
  }
  std::string_view name() const noexcept override { return "random"; }

 private:
  SplitMix64 rng_;
};

}  // namespace

TEST_CASE("reward arithmetic") {
  CHECK(step_reward(100, 100, 91, {300, 1}) == doctest::Approx(26.0).epsilon(1e-15));
  CHECK(step_reward(37.5, 12.25, 12.25, {300, 1}) == -1.0);
  CHECK(step_reward(10, 10, 9, {0, 1}) == -1.0);
}

TEST_CASE("initial columns") {
  const Instance a{"a", 10, {4, 3}, {1, 1}};
  const auto cols = init_columns(a);
  REQUIRE(cols.size() == 2);
  CHECK(cols[0].counts == std::vector<int>{2, 0});
  CHECK(cols[1].counts == std::vector<int>{0, 3});
  const Instance b{"b", 5, {5}, {3}};
  CHECK(init_columns(b)[0].counts == std::vector<int>{1});
}

TEST_CASE("initial RMP is always optimal") {
  SplitMix64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const Instance inst = generate_instance(static_cast<int>(rng.uniform_int(5, 60)),
                                            static_cast<int>(rng.uniform_int(1, 40)), 0.1, 0.7, rng.next());
    std::vector<std::vector<int>> cols;
    for (const auto& p : init_columns(inst)) cols.push_back(p.counts);
    CHECK(solve_rmp(cols, inst.demands).status == LpStatus::Optimal);
  }
}

TEST_CASE("reset builds the initial state") {
  const Instance inst{"desk", 10, {5, 4, 3}, {1, 2, 2}};
  CgEnvironment env;
  const auto s = env.reset(inst);
  REQUIRE(s);
  CHECK(s->num_constraints == 3);
  CHECK(s->num_columns() == 3 + s->num_actions());
  CHECK(s->num_actions() <= kDefaultPoolSize);
  CHECK(env.rmp().obj_history.size() == 1);
  CgEnvironment again;
  const auto t = again.reset(inst);
  CHECK(t->column_features == s->column_features);
  CHECK(t->raw_column_features == s->raw_column_features);
}

TEST_CASE("already optimal start is terminal") {
  CgEnvironment env;
  CHECK(env.reset(Instance{"one", 5, {5}, {3}}) == nullptr);
  CHECK(env.done());
  CHECK_THROWS_AS(env.step(0), EnvironmentError);
}

TEST_CASE("invalid action index") {
  CgEnvironment env;
  const auto s = env.reset(fixture::tiny_instance());
  REQUIRE(s);
  CHECK_THROWS_AS(env.step(s->num_actions()), EnvironmentError);
}

TEST_CASE("tiny instance converges to the LP optimum under greedy") {
  const Instance inst{"t", 4, {2, 1}, {2, 4}};
  GreedyPolicy greedy;
  const CgRun run = run_cg(inst, greedy);
  CHECK(run.converged);
  CHECK(run.objective == doctest::Approx(full_enumeration_optimum(inst)).epsilon(1e-9));
}

TEST_CASE("single order type converges within one pricing round") {
  GreedyPolicy greedy;
  const CgRun run = run_cg(Instance{"s", 10, {3}, {7}}, greedy);
  CHECK(run.converged);
  CHECK(run.iterations <= 1);
}

TEST_CASE("policy invariance of the converged objective and dynamics invariants") {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 25; ++trial) {
    const Instance inst = generate_instance(static_cast<int>(rng.uniform_int(6, 12)),
                                            static_cast<int>(rng.uniform_int(2, 15)), 0.1, 0.7, rng.next());
    const double opt = full_enumeration_optimum(inst);
    RandomSelector random(rng.next());
    GreedyPolicy greedy;
    ExpertPolicy expert;
    for (ColumnSelector* policy : std::initializer_list<ColumnSelector*>{&greedy, &expert, &random}) {
      CgEnvironment env;
      auto s = env.reset(inst);
      double total = 0.0;
      int t = 0;
      while (s) {
        const auto out = env.step(policy->select(env));
        total += out.reward;
        ++t;
        const auto& h = env.rmp().obj_history;
        CHECK(h[h.size() - 1] <= h[h.size() - 2] + 1e-9);
        const auto& rmp = env.rmp();
        for (std::size_t p = 0; p < rmp.columns.size(); ++p) {
          const auto& d = rmp.dynamics[p];
          CHECK(d.iters_in_basis + d.iters_out_of_basis == rmp.iteration - d.added_iteration);
          CHECK(d.in_basis == (rmp.solution.lambda[p] > kInBasisThreshold));
        }
        s = out.next_state;
      }
      const auto& h = env.rmp().obj_history;
      CHECK(env.rmp().solution.objective == doctest::Approx(opt).epsilon(1e-6));
      CHECK(std::abs(total - (300.0 * (h.front() - h.back()) / h.front() - t)) <= 1e-9);
    }
  }
}

TEST_CASE("iteration cap is reported") {
  const Instance inst = generate_instance(50, 40, 0.1, 0.7, 3);
  GreedyPolicy greedy;
  const CgRun run = run_cg(inst, greedy, {2});
  CHECK(run.iterations == 2);
  CHECK_FALSE(run.converged);
  CHECK(run.trajectory.size() == 3);
}

TEST_CASE("trajectory normalization") {
  const auto n = normalize_trajectory({10, 8, 8, 6});
  CHECK(n == std::vector<double>{1.0, 0.5, 0.5, 0.0});
  CHECK(normalize_trajectory({3, 3}) == std::vector<double>{0.0, 0.0});
  std::ostringstream out;
  write_trajectory_csv(out, {10, 6});
  const CsvTable t = parse_csv(out.str());
  CHECK(t.rows.size() == 2);
  CHECK(t.number(0, "normalized_objective") == 1.0);
  CHECK(t.number(1, "normalized_objective") == 0.0);
  CHECK(out.str().rfind("# rlcg-csv v1\n", 0) == 0);
}
