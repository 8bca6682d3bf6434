#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace rlcg {

// One cutting pattern: counts[i] pieces of order type i cut from a roll.
struct Pattern {
  std::vector<int> counts;
  double reduced_cost = 1.0;  // 1 - duals . counts
  int waste = 0;              // L - sizes . counts

  int degree() const noexcept;  // number of order types with a positive count
  friend bool operator==(const Pattern&, const Pattern&) = default;
};

// Improving columns from one pricing round, sorted by reduced cost ascending
// (ties: lexicographically larger count vector first).
struct CandidateSet {
  std::vector<Pattern> patterns;
  std::size_t capacity = 10;

  bool empty() const noexcept { return patterns.empty(); }
  std::size_t size() const noexcept { return patterns.size(); }
};

inline constexpr std::size_t kDefaultPoolSize = 10;
inline constexpr double kDefaultReducedCostTol = 1e-6;

// duals . counts accumulated left to right. The pricing DP, the brute-force
// oracle and the state features all use this order so that equal patterns
// produce bit-equal values.
double pattern_value(std::span<const double> duals, std::span<const int> counts);

Pattern make_pattern(std::vector<int> counts, std::span<const double> duals, std::span<const int> sizes,
                     int roll_length);

// Strict total order used for ranking: a ranks before b when its reduced cost
// is lower, or equal and its count vector is lexicographically larger.
bool ranks_before(const Pattern& a, const Pattern& b) noexcept;

// Up to k distinct integer patterns with sizes . x <= L ranked by reduced
// cost, keeping only those with reduced cost < -tol_rc. Exact: a k-best
// dynamic program over items and capacities 0..L.
CandidateSet kbest_knapsack(std::span<const double> duals, std::span<const int> sizes, int roll_length,
                            std::size_t k = kDefaultPoolSize, double tol_rc = kDefaultReducedCostTol);

class EnumerationLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline constexpr double kMaxEnumeration = 1e7;

// Every feasible pattern (including the zero pattern), reduced cost priced at
// zero duals. Throws EnumerationLimitError when prod(floor(L/a_i) + 1) > 1e7.
std::vector<Pattern> brute_force_patterns(std::span<const int> sizes, int roll_length);

// Homogeneous patterns floor(L/a_i) * e_i, one per order type.
std::vector<std::vector<int>> homogeneous_patterns(std::span<const int> sizes, int roll_length);

}  // namespace rlcg
