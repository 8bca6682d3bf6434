#include "rlcg/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rlcg/kernels/kernels.hpp"

namespace rlcg {

RmpSolver::RmpSolver(std::vector<double> demands, SimplexOptions options)
    : demands_(std::move(demands)), options_(options) {
  if (demands_.empty()) throw DimensionError("RMP needs at least one demand row");
  for (double d : demands_)
    if (!(d >= 0.0) || !std::isfinite(d)) throw DimensionError("demands must be finite and nonnegative");
  const std::size_t m = demands_.size();
  surplus_in_basis_.assign(m, false);
  scratch_col_.resize(m);
  scratch_alpha_.resize(m);
  reset_to_artificial_basis();
}

std::size_t RmpSolver::add_column(std::span<const int> counts) {
  if (counts.size() != demands_.size())
    throw DimensionError("column has " + std::to_string(counts.size()) + " entries, expected " +
                         std::to_string(demands_.size()));
  std::vector<double> col(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 0) throw DimensionError("column entries must be nonnegative");
    col[i] = static_cast<double>(counts[i]);
  }
  columns_.push_back(std::move(col));
  in_basis_.push_back(false);
  return num_structural_++;
}

double RmpSolver::cost(int var, Phase phase) const noexcept {
  if (phase == Phase::One) return is_artificial(var) ? 1.0 : 0.0;
  return var >= 0 ? 1.0 : 0.0;
}

void RmpSolver::column_of(int var, std::vector<double>& out) const {
  std::fill(out.begin(), out.end(), 0.0);
  if (var >= 0) {
    std::copy(columns_[static_cast<std::size_t>(var)].begin(),
              columns_[static_cast<std::size_t>(var)].end(), out.begin());
  } else if (is_artificial(var)) {
    out[static_cast<std::size_t>(-var - 1)] = 1.0;
  } else {
    out[surplus_row(var)] = -1.0;
  }
}

void RmpSolver::reset_to_artificial_basis() {
  const std::size_t m = demands_.size();
  basis_.resize(m);
  for (std::size_t r = 0; r < m; ++r) basis_[r] = artificial_id(r);
  std::fill(in_basis_.begin(), in_basis_.end(), false);
  std::fill(surplus_in_basis_.begin(), surplus_in_basis_.end(), false);
  binv_.assign(m * m, 0.0);
  for (std::size_t r = 0; r < m; ++r) binv_[r * m + r] = 1.0;
  x_basic_ = demands_;
  warm_ = false;
  bland_ = false;
  degenerate_run_ = 0;
  pivots_since_refactor_ = 0;
}

void RmpSolver::refactor() {
  const std::size_t m = demands_.size();
  // Gauss-Jordan on [B | I] with partial pivoting.
  std::vector<double> b(m * m);
  for (std::size_t r = 0; r < m; ++r) {
    column_of(basis_[r], scratch_col_);
    for (std::size_t i = 0; i < m; ++i) b[i * m + r] = scratch_col_[i];
  }
  std::vector<double> inv(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) inv[i * m + i] = 1.0;
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t piv = c;
    double best = std::abs(b[c * m + c]);
    for (std::size_t i = c + 1; i < m; ++i)
      if (std::abs(b[i * m + c]) > best) best = std::abs(b[i * m + c]), piv = i;
    if (best < 1e-12) throw std::runtime_error("simplex basis became singular");
    if (piv != c) {
      std::swap_ranges(b.begin() + static_cast<long>(c * m), b.begin() + static_cast<long>((c + 1) * m),
                       b.begin() + static_cast<long>(piv * m));
      std::swap_ranges(inv.begin() + static_cast<long>(c * m), inv.begin() + static_cast<long>((c + 1) * m),
                       inv.begin() + static_cast<long>(piv * m));
    }
    const double scale = 1.0 / b[c * m + c];
    for (std::size_t k = 0; k < m; ++k) {
      b[c * m + k] *= scale;
      inv[c * m + k] *= scale;
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (i == c) continue;
      const double f = b[i * m + c];
      if (f == 0.0) continue;
      kernels::axpy(-f, {b.data() + c * m, m}, {b.data() + i * m, m});
      kernels::axpy(-f, {inv.data() + c * m, m}, {inv.data() + i * m, m});
    }
  }
  binv_ = std::move(inv);
  for (std::size_t r = 0; r < m; ++r) {
    double x = kernels::dot({binv_.data() + r * m, m}, demands_);
    const double tol = options_.feasibility_tol * std::max(1.0, std::abs(demands_[r]));
    if (x < 0.0 && x > -tol) x = 0.0;
    x_basic_[r] = x;
  }
  pivots_since_refactor_ = 0;
}

void RmpSolver::compute_duals(Phase phase) {
  const std::size_t m = demands_.size();
  duals_.assign(m, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    const double c = cost(basis_[r], phase);
    if (c != 0.0) kernels::axpy(c, {binv_.data() + r * m, m}, duals_);
  }
}

bool RmpSolver::iterate(Phase phase) {
  const std::size_t m = demands_.size();
  compute_duals(phase);

  // Pricing: Dantzig (most negative reduced cost) or Bland (lowest index).
  int entering = 0;
  bool found = false;
  double best_rc = -options_.optimality_tol;
  auto consider = [&](int var, double rc) {
    if (rc >= -options_.optimality_tol) return;
    if (bland_) {
      if (!found) entering = var, found = true;
      return;
    }
    if (rc < best_rc) best_rc = rc, entering = var, found = true;
  };
  for (std::size_t j = 0; j < num_structural_ && !(bland_ && found); ++j) {
    if (in_basis_[j]) continue;
    consider(static_cast<int>(j), cost(static_cast<int>(j), phase) - kernels::dot(duals_, columns_[j]));
  }
  if (options_.covering_rows) {
    for (std::size_t i = 0; i < m && !(bland_ && found); ++i) {
      if (surplus_in_basis_[i]) continue;
      consider(surplus_id(i), duals_[i]);  // c = 0, column -e_i
    }
  }
  if (!found) return false;

  column_of(entering, scratch_col_);
  for (std::size_t r = 0; r < m; ++r) scratch_alpha_[r] = kernels::dot({binv_.data() + r * m, m}, scratch_col_);

  // Ratio test. In phase 2 a basic artificial sits at zero and must leave on
  // any nonzero pivot entry so that it never becomes positive.
  std::size_t leave = m;
  double best_ratio = std::numeric_limits<double>::infinity();
  double best_alpha = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    const double a = scratch_alpha_[r];
    double ratio;
    if (phase == Phase::Two && is_artificial(basis_[r])) {
      if (std::abs(a) <= options_.pivot_tol) continue;
      ratio = 0.0;
    } else {
      if (a <= options_.pivot_tol) continue;
      ratio = std::max(0.0, x_basic_[r]) / a;
    }
    bool better;
    if (leave == m || ratio < best_ratio - 1e-12) {
      better = true;
    } else if (ratio <= best_ratio + 1e-12) {
      better = bland_ ? basis_[r] < basis_[leave] : std::abs(a) > std::abs(best_alpha);
    } else {
      better = false;
    }
    if (better) leave = r, best_ratio = ratio, best_alpha = a;
  }
  if (leave == m) throw std::logic_error("restricted master problem is unbounded");

  // Pivot.
  const double theta = best_ratio;
  const double pivot = scratch_alpha_[leave];
  double* pivot_row = binv_.data() + leave * m;
  for (std::size_t k = 0; k < m; ++k) pivot_row[k] /= pivot;
  for (std::size_t r = 0; r < m; ++r) {
    if (r == leave) continue;
    const double a = scratch_alpha_[r];
    if (a == 0.0) continue;
    kernels::axpy(-a, {pivot_row, m}, {binv_.data() + r * m, m});
    x_basic_[r] -= a * theta;
    if (x_basic_[r] < 0.0 && !is_artificial(basis_[r])) x_basic_[r] = std::max(x_basic_[r], 0.0);
  }
  x_basic_[leave] = theta;

  const int leaving = basis_[leave];
  if (leaving >= 0) in_basis_[static_cast<std::size_t>(leaving)] = false;
  else if (is_surplus(leaving)) surplus_in_basis_[surplus_row(leaving)] = false;
  basis_[leave] = entering;
  if (entering >= 0) in_basis_[static_cast<std::size_t>(entering)] = true;
  else surplus_in_basis_[surplus_row(entering)] = true;

  ++pivots_;
  if (pivots_ > options_.max_pivots) throw std::runtime_error("simplex pivot limit exceeded");
  if (theta <= 1e-12) {
    if (++degenerate_run_ >= options_.bland_after_degenerate) bland_ = true;
  } else {
    degenerate_run_ = 0;
  }
  if (++pivots_since_refactor_ >= options_.refactor_every) refactor();
  return true;
}

void RmpSolver::drive_out_artificials() {
  const std::size_t m = demands_.size();
  for (std::size_t r = 0; r < m; ++r) {
    if (!is_artificial(basis_[r])) continue;
    const double* row = binv_.data() + r * m;
    int entering = 0;
    bool found = false;
    double alpha = 0.0;
    for (std::size_t j = 0; j < num_structural_ && !found; ++j) {
      if (in_basis_[j]) continue;
      alpha = kernels::dot({row, m}, columns_[j]);
      if (std::abs(alpha) > 1e-7) entering = static_cast<int>(j), found = true;
    }
    if (!found && options_.covering_rows) {
      for (std::size_t i = 0; i < m && !found; ++i) {
        if (surplus_in_basis_[i]) continue;
        alpha = -row[i];
        if (std::abs(alpha) > 1e-7) entering = surplus_id(i), found = true;
      }
    }
    if (!found) continue;  // redundant row; the artificial stays basic at zero
    column_of(entering, scratch_col_);
    for (std::size_t i = 0; i < m; ++i) scratch_alpha_[i] = kernels::dot({binv_.data() + i * m, m}, scratch_col_);
    double* pivot_row = binv_.data() + r * m;
    const double pivot = scratch_alpha_[r];
    for (std::size_t k = 0; k < m; ++k) pivot_row[k] /= pivot;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || scratch_alpha_[i] == 0.0) continue;
      kernels::axpy(-scratch_alpha_[i], {pivot_row, m}, {binv_.data() + i * m, m});
    }
    basis_[r] = entering;
    if (entering >= 0) in_basis_[static_cast<std::size_t>(entering)] = true;
    else surplus_in_basis_[surplus_row(entering)] = true;
    ++pivots_since_refactor_;
  }
  refactor();
}

void RmpSolver::extract_solution(LpStatus status) {
  const std::size_t m = demands_.size();
  solution_.status = status;
  solution_.pivots = pivots_;
  solution_.lambda.assign(num_structural_, 0.0);
  if (status != LpStatus::Optimal) {
    solution_.duals.assign(m, 0.0);
    solution_.objective = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  double objective = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    if (basis_[r] < 0) continue;
    const double x = std::max(0.0, x_basic_[r]);
    solution_.lambda[static_cast<std::size_t>(basis_[r])] = x;
  }
  // Summed in column order so the value does not depend on basis row order.
  for (double x : solution_.lambda) objective += x;
  solution_.duals = duals_;
  solution_.objective = objective;
}

const LpSolution& RmpSolver::solve_cold() {
  if (num_structural_ == 0) throw DimensionError("RMP has no columns");
  reset_to_artificial_basis();
  pivots_ = 0;

  for (;;) {
    while (iterate(Phase::One)) {
    }
    refactor();
    if (!iterate(Phase::One)) break;
  }
  double infeasibility = 0.0;
  double scale = 1.0;
  for (std::size_t r = 0; r < demands_.size(); ++r) {
    scale = std::max(scale, std::abs(demands_[r]));
    if (is_artificial(basis_[r])) infeasibility += std::max(0.0, x_basic_[r]);
  }
  if (infeasibility > options_.feasibility_tol * scale) {
    compute_duals(Phase::Two);
    extract_solution(LpStatus::Infeasible);
    warm_ = false;
    return solution_;
  }
  drive_out_artificials();
  bland_ = false;
  degenerate_run_ = 0;
  warm_ = true;
  return solve();
}

const LpSolution& RmpSolver::solve() {
  if (!warm_) return solve_cold();
  // Optimality is only declared against a fresh factorization.
  for (;;) {
    while (iterate(Phase::Two)) {
    }
    refactor();
    if (!iterate(Phase::Two)) break;
  }
  compute_duals(Phase::Two);
  extract_solution(LpStatus::Optimal);
  return solution_;
}

LpSolution solve_rmp(const std::vector<std::vector<int>>& columns, std::span<const int> demands,
                     const SimplexOptions& options) {
  if (columns.empty()) throw DimensionError("RMP has no columns");
  std::vector<double> d(demands.begin(), demands.end());
  RmpSolver solver(std::move(d), options);
  for (const auto& col : columns) solver.add_column(col);
  return solver.solve_cold();
}

}  // namespace rlcg
