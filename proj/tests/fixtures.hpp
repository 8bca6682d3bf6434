#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "rlcg/cg_engine.hpp"
#include "rlcg/instances.hpp"
#include "rlcg/rng.hpp"
#include "rlcg/state_graph.hpp"

namespace fixture {

// A state reached by random actions on a random small instance.
inline rlcg::StatePtr random_state(rlcg::SplitMix64& rng, int max_roll = 30, int max_items = 20) {
  for (;;) {
    const int L = static_cast<int>(rng.uniform_int(8, max_roll));
    const int items = static_cast<int>(rng.uniform_int(3, max_items));
    const rlcg::Instance inst = rlcg::generate_instance(L, items, 0.1, 0.7, rng.next());
    rlcg::CgEnvironment env;
    rlcg::StatePtr s = env.reset(inst);
    if (!s) continue;
    const auto steps = rng.uniform_int(0, 5);
    for (std::int64_t t = 0; t < steps; ++t) {
      const auto a = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(s->num_actions()) - 1));
      auto out = env.step(a);
      if (out.done) break;
      s = out.next_state;
    }
    return s;
  }
}

inline std::vector<std::size_t> random_permutation(rlcg::SplitMix64& rng, std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
  return p;
}

// Node v of the input becomes node col_perm[v] (constraint c becomes
// con_perm[c]). action_indices keep their order, so action a still refers to
// the same candidate.
inline rlcg::BipartiteState permute(const rlcg::BipartiteState& s, const std::vector<std::size_t>& col_perm,
                                    const std::vector<std::size_t>& con_perm) {
  rlcg::BipartiteState out = s;
  auto permute_rows = [](const rlcg::Matrix& m, const std::vector<std::size_t>& p) {
    rlcg::Matrix r(m.rows, m.cols);
    for (std::size_t i = 0; i < m.rows; ++i) std::copy(m.row(i).begin(), m.row(i).end(), r.row(p[i]).begin());
    return r;
  };
  for (std::size_t v = 0; v < s.num_columns(); ++v) out.column_nodes[col_perm[v]] = s.column_nodes[v];
  out.raw_column_features = permute_rows(s.raw_column_features, col_perm);
  out.column_features = permute_rows(s.column_features, col_perm);
  out.raw_constraint_features = permute_rows(s.raw_constraint_features, con_perm);
  out.constraint_features = permute_rows(s.constraint_features, con_perm);
  for (auto& e : out.edges) {
    e.column = col_perm[e.column];
    e.constraint = con_perm[e.constraint];
  }
  std::sort(out.edges.begin(), out.edges.end(), [](const rlcg::Edge& a, const rlcg::Edge& b) {
    return a.column != b.column ? a.column < b.column : a.constraint < b.constraint;
  });
  for (auto& a : out.action_indices) a = col_perm[a];
  return out;
}

inline rlcg::Instance tiny_instance() { return rlcg::Instance{"tiny", 10, {5, 4, 3}, {1, 2, 2}}; }

}  // namespace fixture
