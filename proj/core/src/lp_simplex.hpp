#pragma once

#include <cstddef>
#include <vector>

namespace psieve::detail {

/// Standard-form linear program: minimize cost . x subject to A x = b, x >= 0.
/// A is dense, row-major, rows x cols.
struct StandardLp {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> cost;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  double objective = 0.0;
  std::vector<double> x;
  std::vector<double> multipliers;  ///< pi with B^T pi = cost_B, one per row
  int pivots = 0;
};

/// Dense two-phase tableau simplex. Dantzig pricing, switching to Bland's rule
/// after a run of degenerate pivots.
LpSolution solve_simplex(const StandardLp& lp, int max_pivots = 200000, double tol = 1e-9);

}  // namespace psieve::detail
