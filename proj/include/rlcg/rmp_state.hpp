#pragma once

#include <vector>

#include "rlcg/pricing.hpp"
#include "rlcg/simplex.hpp"

namespace rlcg {

// A column counts as "in the basis" when its primal value exceeds this.
inline constexpr double kInBasisThreshold = 1e-6;

struct ColumnDynamics {
  int iters_in_basis = 0;
  int iters_out_of_basis = 0;
  bool entered_last_iter = false;
  bool left_last_iter = false;
  bool in_basis = false;
  int added_iteration = 0;
};

// The restricted master problem after `iteration` columns have been added.
// columns[p].reduced_cost is priced at the current duals.
struct RmpState {
  std::vector<Pattern> columns;
  LpSolution solution;
  int iteration = 0;
  std::vector<double> obj_history;
  std::vector<ColumnDynamics> dynamics;
};

}  // namespace rlcg
