#include "rlcg/pricing.hpp"

#include <algorithm>
#include <queue>
#include <string>

namespace rlcg {

int Pattern::degree() const noexcept {
  return static_cast<int>(std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; }));
}

double pattern_value(std::span<const double> duals, std::span<const int> counts) {
  double v = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) v += static_cast<double>(counts[i]) * duals[i];
  return v;
}

Pattern make_pattern(std::vector<int> counts, std::span<const double> duals, std::span<const int> sizes,
                     int roll_length) {
  Pattern p;
  long long used = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) used += static_cast<long long>(counts[i]) * sizes[i];
  p.waste = static_cast<int>(roll_length - used);
  p.reduced_cost = 1.0 - pattern_value(duals, counts);
  p.counts = std::move(counts);
  return p;
}

bool ranks_before(const Pattern& a, const Pattern& b) noexcept {
  if (a.reduced_cost != b.reduced_cost) return a.reduced_cost < b.reduced_cost;
  return std::lexicographical_compare(b.counts.begin(), b.counts.end(), a.counts.begin(), a.counts.end());
}

namespace {

struct Entry {
  double value;  // duals . counts over the items processed so far
  std::vector<int> counts;
};

// A candidate in the merge for cell (item, capacity): entry `pos` of
// prev[capacity - t * size] extended with t copies of the current item.
struct Cursor {
  int t;
  std::size_t pos;
  double value;
};

}  // namespace

CandidateSet kbest_knapsack(std::span<const double> duals, std::span<const int> sizes, int roll_length,
                            std::size_t k, double tol_rc) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  if (duals.size() != sizes.size()) throw std::invalid_argument("duals and sizes differ in length");
  const std::size_t n = sizes.size();
  const auto cells = static_cast<std::size_t>(std::max(roll_length, 0)) + 1;

  const std::size_t keep = k + 4;
  std::vector<std::vector<Entry>> prev(cells), cur(cells);
  for (auto& cell : prev) cell.push_back({0.0, std::vector<int>(n, 0)});

  for (std::size_t item = 0; item < n; ++item) {
    const int size = sizes[item];
    const double price = duals[item];
    for (std::size_t cap = 0; cap < cells; ++cap) {
      // Rank within a cell: higher value first, then lexicographically larger
      // counts. Positions before `item` come from the source entry, position
      // `item` is t, later positions are zero.
      auto before = [&](const Cursor& a, const Cursor& b) {
        if (a.value != b.value) return a.value > b.value;
        const auto& ca = prev[cap - static_cast<std::size_t>(a.t) * size][a.pos].counts;
        const auto& cb = prev[cap - static_cast<std::size_t>(b.t) * size][b.pos].counts;
        for (std::size_t i = 0; i < item; ++i)
          if (ca[i] != cb[i]) return ca[i] > cb[i];
        return a.t > b.t;
      };
      auto heap_less = [&](const Cursor& a, const Cursor& b) { return before(b, a); };
      std::priority_queue<Cursor, std::vector<Cursor>, decltype(heap_less)> heap(heap_less);
      const int max_t = size > 0 ? static_cast<int>(cap) / size : 0;
      for (int t = 0; t <= max_t; ++t) {
        const auto& src = prev[cap - static_cast<std::size_t>(t) * size];
        heap.push({t, 0, src[0].value + static_cast<double>(t) * price});
      }
      auto& out = cur[cap];
      out.clear();
      while (!heap.empty() && out.size() < keep) {
        const Cursor top = heap.top();
        heap.pop();
        const auto& src = prev[cap - static_cast<std::size_t>(top.t) * size];
        Entry e{top.value, src[top.pos].counts};
        e.counts[item] = top.t;
        out.push_back(std::move(e));
        if (top.pos + 1 < src.size())
          heap.push({top.t, top.pos + 1, src[top.pos + 1].value + static_cast<double>(top.t) * price});
      }
      // Adding t * price can round two distinct values to the same double, so
      // a source list is only nearly sorted in the new order; the extra slack
      // entries plus a final sort keep the cell exact.
      std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) {
        if (a.value != b.value) return a.value > b.value;
        return std::lexicographical_compare(b.counts.begin(), b.counts.end(), a.counts.begin(), a.counts.end());
      });
    }
    std::swap(prev, cur);
  }

  CandidateSet result;
  result.capacity = k;
  std::vector<Pattern> ranked;
  for (auto& e : prev[cells - 1]) ranked.push_back(make_pattern(std::move(e.counts), duals, sizes, roll_length));
  std::sort(ranked.begin(), ranked.end(), ranks_before);
  if (ranked.size() > k) ranked.resize(k);
  for (auto& p : ranked)
    if (p.reduced_cost < -tol_rc) result.patterns.push_back(std::move(p));
  return result;
}

std::vector<Pattern> brute_force_patterns(std::span<const int> sizes, int roll_length) {
  double bound = 1.0;
  for (int a : sizes) {
    if (a < 1) throw std::invalid_argument("sizes must be positive");
    bound *= static_cast<double>(roll_length / a + 1);
  }
  if (bound > kMaxEnumeration)
    throw EnumerationLimitError("pattern enumeration bound " + std::to_string(bound) + " exceeds 1e7");
  const std::size_t n = sizes.size();
  const std::vector<double> zero_duals(n, 0.0);
  std::vector<Pattern> out;
  std::vector<int> counts(n, 0);
  auto rec = [&](auto&& self, std::size_t i, int remaining) -> void {
    if (i == n) {
      out.push_back(make_pattern(counts, zero_duals, sizes, roll_length));
      return;
    }
    for (int t = 0; t * sizes[i] <= remaining; ++t) {
      counts[i] = t;
      self(self, i + 1, remaining - t * sizes[i]);
    }
    counts[i] = 0;
  };
  rec(rec, 0, roll_length);
  return out;
}

std::vector<std::vector<int>> homogeneous_patterns(std::span<const int> sizes, int roll_length) {
  std::vector<std::vector<int>> out;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    std::vector<int> col(sizes.size(), 0);
    col[i] = roll_length / sizes[i];
    out.push_back(std::move(col));
  }
  return out;
}

}  // namespace rlcg
