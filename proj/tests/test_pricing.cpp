#include <doctest.h>

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "rlcg/pricing.hpp"
#include "rlcg/rng.hpp"

using namespace rlcg;

namespace {

struct RandomPricing {
  std::vector<double> duals;
  std::vector<int> sizes;
  int L;
  std::size_t k;
};

RandomPricing random_pricing(SplitMix64& rng) {
  RandomPricing p;
  p.L = static_cast<int>(rng.uniform_int(1, 20));
  const int m = static_cast<int>(rng.uniform_int(1, 6));
  std::set<int, std::greater<>> sizes;
  for (int i = 0; i < m; ++i) sizes.insert(static_cast<int>(rng.uniform_int(1, p.L)));
  p.sizes.assign(sizes.begin(), sizes.end());
  for (int s : p.sizes) {
    // Duals roughly proportional to size so that many patterns improve.
    p.duals.push_back(rng.uniform(0.0, 1.6) * s / p.L);
  }
  p.k = static_cast<std::size_t>(rng.uniform_int(1, 10));
  return p;
}

}  // namespace

TEST_CASE("worked example against enumeration") {
  // (2,1) has reduced cost 1 - 1.7 = -0.7, but (3,0) fits as well (9 <= 10)
  // and prices at -0.8, so enumeration ranks it first.
  const std::vector<double> duals = {0.6, 0.5};
  const std::vector<int> sizes = {3, 4};
  const CandidateSet c = kbest_knapsack(duals, sizes, 10, 3);
  const auto ranked = oracle::ranked_patterns(duals, sizes, 10);
  REQUIRE(c.size() == 3);
  CHECK(ranked[0].counts == std::vector<int>{3, 0});
  CHECK(c.patterns[0].counts == ranked[0].counts);
  CHECK(c.patterns[0].reduced_cost == doctest::Approx(-0.8));
  CHECK(c.patterns[0].waste == 1);
  CHECK(c.patterns[1].counts == std::vector<int>{2, 1});
  CHECK(c.patterns[1].reduced_cost == doctest::Approx(-0.7));
  CHECK(c.patterns[1].waste == 0);
  for (std::size_t i = 0; i < 3; ++i) CHECK(c.patterns[i].counts == ranked[i].counts);
}

TEST_CASE("zero duals price nothing") {
  const std::vector<double> duals = {0.0, 0.0, 0.0};
  const std::vector<int> sizes = {7, 5, 2};
  CHECK(kbest_knapsack(duals, sizes, 15, 10).empty());
}

TEST_CASE("boundary reduced cost is excluded") {
  const std::vector<double> duals = {1.0};
  const std::vector<int> sizes = {9};
  CHECK(kbest_knapsack(duals, sizes, 9, 10).empty());
}

TEST_CASE("brute force enumeration examples") {
  {
    const std::vector<int> sizes = {1, 2, 3, 4};
    const auto all = brute_force_patterns(sizes, 4);
    CHECK(std::any_of(all.begin(), all.end(), [](const Pattern& p) { return p.counts == std::vector<int>{0, 2, 0, 0}; }));
  }
  {
    const std::vector<int> sizes = {5};
    const auto all = brute_force_patterns(sizes, 4);
    REQUIRE(all.size() == 1);
    CHECK(all[0].counts == std::vector<int>{0});
  }
  {
    const std::vector<int> sizes = {2, 3};
    std::set<std::vector<int>> got;
    for (const auto& p : brute_force_patterns(sizes, 6)) got.insert(p.counts);
    const std::set<std::vector<int>> want = {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {0, 1}, {0, 2}, {1, 1}};
    CHECK(got == want);
  }
}

TEST_CASE("enumeration guard") {
  const std::vector<int> sizes = {1, 1, 1, 1, 1, 1, 1, 1};
  CHECK_THROWS_AS(brute_force_patterns(sizes, 20), EnumerationLimitError);
}

TEST_CASE("k-best matches brute force on random problems") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = random_pricing(rng);
    const CandidateSet got = kbest_knapsack(p.duals, p.sizes, p.L, p.k);
    const auto ranked = oracle::ranked_patterns(p.duals, p.sizes, p.L);
    std::vector<std::vector<int>> want;
    for (const auto& r : ranked)
      if (r.reduced_cost < -kDefaultReducedCostTol && want.size() < p.k) want.push_back(r.counts);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(got.patterns[i].counts == want[i]);
    if (!want.empty()) CHECK(got.patterns[0].reduced_cost == ranked[0].reduced_cost);
  }
}

TEST_CASE("returned patterns satisfy the pattern invariants") {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_pricing(rng);
    const CandidateSet got = kbest_knapsack(p.duals, p.sizes, p.L, p.k);
    CHECK(got.size() <= p.k);
    std::set<std::vector<int>> distinct;
    for (const auto& pat : got.patterns) {
      int used = 0;
      for (std::size_t i = 0; i < pat.counts.size(); ++i) {
        CHECK(pat.counts[i] >= 0);
        used += pat.counts[i] * p.sizes[i];
      }
      CHECK(used <= p.L);
      CHECK(pat.waste == p.L - used);
      CHECK(pat.reduced_cost < -kDefaultReducedCostTol);
      CHECK(pat.reduced_cost == doctest::Approx(1.0 - oracle::value(p.duals, pat.counts)).epsilon(1e-12));
      distinct.insert(pat.counts);
    }
    CHECK(distinct.size() == got.size());
    for (std::size_t i = 1; i < got.size(); ++i) CHECK(ranks_before(got.patterns[i - 1], got.patterns[i]));
  }
}

TEST_CASE("enlarging k keeps the prefix") {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_pricing(rng);
    const CandidateSet small = kbest_knapsack(p.duals, p.sizes, p.L, 1);
    const CandidateSet big = kbest_knapsack(p.duals, p.sizes, p.L, 10);
    REQUIRE(small.empty() == big.empty());
    if (!small.empty()) CHECK(small.patterns[0] == big.patterns[0]);
  }
}

TEST_CASE("ties broken by the larger count vector") {
  // (1,0) and (0,2) both have value 1.5.
  const std::vector<double> duals = {1.5, 0.75};
  const std::vector<int> sizes = {4, 2};
  const CandidateSet c = kbest_knapsack(duals, sizes, 4, 10);
  REQUIRE(c.size() == 2);
  CHECK(c.patterns[0].counts == std::vector<int>{1, 0});
  CHECK(c.patterns[1].counts == std::vector<int>{0, 2});
}

TEST_CASE("homogeneous patterns") {
  const std::vector<int> sizes = {7, 3};
  const auto h = homogeneous_patterns(sizes, 10);
  CHECK(h == std::vector<std::vector<int>>{{1, 0}, {0, 3}});
}
