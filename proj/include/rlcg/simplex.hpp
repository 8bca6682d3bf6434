#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace rlcg {

enum class LpStatus { Optimal, Infeasible };

struct LpSolution {
  std::vector<double> lambda;  // one per column
  std::vector<double> duals;   // one per demand row
  double objective = 0.0;
  LpStatus status = LpStatus::Infeasible;
  int pivots = 0;
};

struct SimplexOptions {
  double feasibility_tol = 1e-8;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  // Rows are "= d_i" unless set, in which case they become "≥ d_i".
  bool covering_rows = false;
  int bland_after_degenerate = 1000;
  int refactor_every = 64;
  int max_pivots = 200000;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Dense revised simplex for the restricted master problem
//
//   min  sum_p lambda_p   s.t.  sum_p x_ip lambda_p = d_i,  lambda >= 0.
//
// The object owns the column set and the factorized basis; adding a column
// after an optimal solve and calling solve() again continues from the old
// basis (phase 2 only). The basis inverse is kept explicitly and rebuilt by
// Gauss-Jordan elimination every refactor_every pivots and before declaring
// optimality.
class RmpSolver {
 public:
  explicit RmpSolver(std::vector<double> demands, SimplexOptions options = {});

  // Returns the index of the new column.
  std::size_t add_column(std::span<const int> counts);

  // Warm-starts when the previous solve was optimal, otherwise runs phase 1.
  const LpSolution& solve();
  // Discards the basis and solves from the all-artificial start.
  const LpSolution& solve_cold();

  const LpSolution& solution() const noexcept { return solution_; }
  std::size_t num_rows() const noexcept { return demands_.size(); }
  std::size_t num_columns() const noexcept { return num_structural_; }
  std::span<const double> column(std::size_t j) const { return columns_[j]; }
  std::span<const double> demands() const noexcept { return demands_; }
  const SimplexOptions& options() const noexcept { return options_; }

 private:
  enum class Phase { One, Two };

  // Variable ids: j >= 0 structural column j; -(r+1) artificial of row r;
  // -(m+i+1) surplus of row i (covering rows only).
  int artificial_id(std::size_t row) const noexcept { return -static_cast<int>(row) - 1; }
  int surplus_id(std::size_t row) const noexcept {
    return -static_cast<int>(demands_.size() + row) - 1;
  }
  bool is_artificial(int var) const noexcept {
    return var < 0 && var >= -static_cast<int>(demands_.size());
  }
  bool is_surplus(int var) const noexcept { return var < -static_cast<int>(demands_.size()); }
  std::size_t surplus_row(int var) const noexcept {
    return static_cast<std::size_t>(-var - 1) - demands_.size();
  }
  double cost(int var, Phase phase) const noexcept;
  void column_of(int var, std::vector<double>& out) const;

  void reset_to_artificial_basis();
  void refactor();
  void compute_duals(Phase phase);
  bool iterate(Phase phase);  // false once no improving column remains
  void drive_out_artificials();
  void extract_solution(LpStatus status);

  std::vector<double> demands_;
  SimplexOptions options_;
  std::vector<std::vector<double>> columns_;
  std::size_t num_structural_ = 0;

  std::vector<int> basis_;         // variable per row; artificial row r is -(r+1)
  std::vector<bool> in_basis_;     // per structural column
  std::vector<bool> surplus_in_basis_;
  std::vector<double> binv_;       // m*m row-major
  std::vector<double> x_basic_;
  std::vector<double> duals_;
  bool warm_ = false;
  bool bland_ = false;
  int degenerate_run_ = 0;
  int pivots_since_refactor_ = 0;
  int pivots_ = 0;

  std::vector<double> scratch_col_;
  std::vector<double> scratch_alpha_;

  LpSolution solution_;
};

// Convenience cold solve over a column list.
LpSolution solve_rmp(const std::vector<std::vector<int>>& columns, std::span<const int> demands,
                     const SimplexOptions& options = {});

}  // namespace rlcg
