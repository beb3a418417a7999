#include "lp_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "psieve/types.hpp"

namespace psieve::detail {

namespace {

class Tableau {
 public:
  // Columns: [0, n) structural, [n, n + m) artificial, last = rhs.
  Tableau(const StandardLp& lp) : m_(lp.rows), n_(lp.cols), width_(lp.cols + lp.rows + 1) {
    t_.assign((m_ + 1) * width_, 0.0);
    sign_.assign(m_, 1.0);
    basis_.resize(m_);
    for (std::size_t r = 0; r < m_; ++r) {
      sign_[r] = lp.b[r] < 0.0 ? -1.0 : 1.0;
      for (std::size_t c = 0; c < n_; ++c) at(r, c) = sign_[r] * lp.a[r * n_ + c];
      at(r, n_ + r) = 1.0;
      rhs(r) = sign_[r] * lp.b[r];
      basis_[r] = n_ + r;
    }
  }

  double& at(std::size_t r, std::size_t c) { return t_[r * width_ + c]; }
  double& rhs(std::size_t r) { return t_[r * width_ + width_ - 1]; }
  double& obj(std::size_t c) { return t_[m_ * width_ + c]; }
  std::size_t rows() const { return m_; }
  std::size_t structural() const { return n_; }
  std::size_t basis(std::size_t r) const { return basis_[r]; }
  double sign(std::size_t r) const { return sign_[r]; }

  // Objective row holds reduced costs d_c = cost_c - pi . A_c and -z in the rhs slot.
  void set_objective(const std::vector<double>& cost) {
    for (std::size_t c = 0; c < width_; ++c) obj(c) = c < cost.size() ? cost[c] : 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      const double cb = basis_[r] < cost.size() ? cost[basis_[r]] : 0.0;
      if (cb == 0.0) continue;
      for (std::size_t c = 0; c < width_; ++c) obj(c) -= cb * at(r, c);
    }
  }

  void pivot(std::size_t pr, std::size_t pc) {
    const double inv = 1.0 / at(pr, pc);
    double* prow = &t_[pr * width_];
    for (std::size_t c = 0; c < width_; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (std::size_t r = 0; r <= m_; ++r) {
      if (r == pr) continue;
      double* row = &t_[r * width_];
      const double f = row[pc];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < width_; ++c) row[c] -= f * prow[c];
      row[pc] = 0.0;
    }
    basis_[pr] = pc;
  }

  // Runs simplex iterations on the current objective. Columns >= limit never enter.
  LpStatus optimize(std::size_t limit, int max_pivots, double tol, int& pivots) {
    int degenerate_run = 0;
    while (pivots < max_pivots) {
      const bool bland = degenerate_run > 50;
      std::size_t enter = limit;
      double best = -tol;
      for (std::size_t c = 0; c < limit; ++c) {
        const double d = obj(c);
        if (d < best) {
          enter = c;
          if (bland) break;
          best = d;
        }
      }
      if (enter == limit) return LpStatus::Optimal;

      std::size_t leave = m_;
      double ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m_; ++r) {
        const double a = at(r, enter);
        if (a <= tol) continue;
        const double q = rhs(r) / a;
        if (q < ratio - 1e-12 || (q <= ratio + 1e-12 && leave < m_ && basis_[r] < basis_[leave])) {
          ratio = q;
          leave = r;
        }
      }
      if (leave == m_) return LpStatus::Unbounded;
      degenerate_run = ratio <= tol ? degenerate_run + 1 : 0;
      pivot(leave, enter);
      ++pivots;
    }
    return LpStatus::IterationLimit;
  }

 private:
  std::size_t m_, n_, width_;
  std::vector<double> t_;
  std::vector<double> sign_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LpSolution solve_simplex(const StandardLp& lp, int max_pivots, double tol) {
  if (lp.a.size() != lp.rows * lp.cols || lp.b.size() != lp.rows || lp.cost.size() != lp.cols) {
    throw InvalidArgument("simplex: inconsistent problem dimensions");
  }
  Tableau tab(lp);
  const std::size_t n = lp.cols;
  const std::size_t m = lp.rows;
  LpSolution sol;

  // Phase 1: minimize the sum of artificials.
  std::vector<double> phase1(n + m, 0.0);
  for (std::size_t r = 0; r < m; ++r) phase1[n + r] = 1.0;
  tab.set_objective(phase1);
  auto st = tab.optimize(n + m, max_pivots, tol, sol.pivots);
  if (st == LpStatus::IterationLimit) {
    sol.status = st;
    return sol;
  }
  double infeas = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basis(r) >= n) infeas += tab.rhs(r);
  }
  if (infeas > 1e-7 * (1.0 + std::abs(infeas))) {
    sol.status = LpStatus::Infeasible;
    return sol;
  }
  // Drive zero-level artificials out of the basis where a structural pivot exists.
  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basis(r) < n) continue;
    for (std::size_t c = 0; c < n; ++c) {
      if (std::abs(tab.at(r, c)) > 1e-7) {
        tab.pivot(r, c);
        ++sol.pivots;
        break;
      }
    }
  }

  // Phase 2.
  tab.set_objective(lp.cost);
  st = tab.optimize(n, max_pivots, tol, sol.pivots);
  sol.status = st;
  if (st != LpStatus::Optimal) return sol;

  sol.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basis(r) < n) sol.x[tab.basis(r)] = tab.rhs(r);
  }
  sol.objective = 0.0;
  for (std::size_t c = 0; c < n; ++c) sol.objective += lp.cost[c] * sol.x[c];
  // Artificial column r is sign_r * e_r with zero cost, so its reduced cost is -sign_r * pi_r.
  sol.multipliers.assign(m, 0.0);
  for (std::size_t r = 0; r < m; ++r) sol.multipliers[r] = -tab.obj(n + r) * tab.sign(r);
  return sol;
}

}  // namespace psieve::detail
