#include "psieve/recover.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "psieve/random.hpp"
#include "psieve/stft.hpp"

namespace psieve {

namespace {

using CVec = std::vector<Complex>;

double dot_re(const CVec& a, const CVec& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
  return s;
}

double sq_norm(const CVec& a) {
  double s = 0.0;
  for (const auto& v : a) s += std::norm(v);
  return s;
}

double power_norm(const StftOperator& op, int iters, std::uint64_t seed) {
  if (iters < 1) throw InvalidArgument("op_norm_power: iters must be positive");
  const std::size_t n = op.signal_geometry().n;
  const std::size_t m = op.grid().size();
  Rng rng(seed);
  CVec x(n);
  for (auto& v : x) v = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  CVec kx(m);
  CVec y(n);
  double best = 0.0;
  for (int it = 0; it < iters; ++it) {
    const double nx = std::sqrt(sq_norm(x));
    if (!(nx > 0.0)) throw GeometryError("op_norm_power: degenerate operator");
    for (auto& v : x) v /= nx;
    op.apply(x, kx);
    op.apply_adjoint(kx, y);
    // The dt weight cancels in <x, V*V x>_dt / <x, x>_dt.
    best = std::max(best, dot_re(x, y));
    x.swap(y);
  }
  if (!(best > 0.0)) throw GeometryError("op_norm_power: degenerate operator");
  return std::sqrt(best);
}

// Diagonal of V* W V: dA * dt * sum_i phi(t_k - x_i)^2 * (kept cells in row i).
std::vector<double> jacobi_diagonal(const SignalGeometry& sg, const TFGrid& g, const std::vector<std::uint8_t>& keep) {
  std::vector<double> row_count(g.nx, 0.0);
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.nw; ++j) row_count[i] += keep[g.index(i, j)];
  }
  std::vector<double> d(sg.n);
  for (std::size_t k = 0; k < sg.n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.nx; ++i) {
      const double phi = gaussian(sg.time(k) - g.x(i));
      s += phi * phi * row_count[i];
    }
    d[k] = std::max(s * g.cell_area() * sg.dt, 1e-300);
  }
  return d;
}

class WeightedL1Solver {
 public:
  WeightedL1Solver(const TFRepr& observed, std::vector<std::uint8_t> keep, const SignalGeometry& sg,
                   const SolverParams& params)
      : data_(observed.values()), keep_(std::move(keep)), sg_(sg), grid_(observed.grid()), params_(params),
        op_(sg, observed.grid()) {
    params_.validate();
  }

  RecoveryResult run() {
    const std::size_t n = sg_.n;
    const std::size_t m = grid_.size();
    const double dA = grid_.cell_area();

    const double L = power_norm(op_, params_.op_norm_iters, params_.seed);
    const double eta = std::sqrt(params_.step_ratio) / L;
    double weight = 1.0;
    double tau = eta;
    double sigma = eta;

    double data_norm = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      if (keep_[c]) data_norm += std::abs(data_[c]);
    }
    data_norm *= dA;
    const double scale = data_norm > 0.0 ? data_norm : 1.0;

    precond_ = jacobi_diagonal(sg_, grid_, keep_);
    cg_state_.assign(n, Complex{});
    cg_state_sign_.assign(n, Complex{});

    CVec g(n), g_new(n), kty(n);
    CVec kg(m), kg_new(m), kgbar(m), y(m);
    CVec g_anchor(n), y_anchor(m);

    RecoveryResult res{Signal::zeros(sg_), {}, {}, 0, SolverStatus::MaxIters, 0.0, L};
    double objective = primal(kg);

    for (int it = 1; it <= params_.max_iters; ++it) {
      for (std::size_t c = 0; c < m; ++c) {
        if (!keep_[c]) {
          y[c] = Complex{};
          continue;
        }
        const Complex v = y[c] + sigma * (kgbar[c] - data_[c]);
        const double a = std::abs(v);
        y[c] = a > 1.0 ? v / a : v;
      }
      op_.apply_adjoint(y, kty);
      for (std::size_t k = 0; k < n; ++k) g_new[k] = g[k] - tau * kty[k];
      op_.apply(g_new, kg_new);
      for (std::size_t c = 0; c < m; ++c) kgbar[c] = 2.0 * kg_new[c] - kg[c];
      g.swap(g_new);
      kg.swap(kg_new);

      objective = primal(kg);
      res.objective_trace.push_back(objective);
      res.iterations = it;

      if (params_.restart_every > 0 && it % params_.restart_every == 0) {
        // Rebalance tau/sigma (tau*sigma fixed) by the primal and dual movement since the last restart.
        double dg = 0.0, dy = 0.0;
        for (std::size_t k = 0; k < n; ++k) dg += std::norm(g[k] - g_anchor[k]);
        for (std::size_t c = 0; c < m; ++c) dy += std::norm(y[c] - y_anchor[c]);
        dg = std::sqrt(dg * sg_.dt);
        dy = std::sqrt(dy * dA);
        if (dg > 0.0 && dy > 0.0) {
          const double target = std::exp(0.5 * std::log(dy / dg) + 0.5 * std::log(weight));
          weight = std::clamp(std::clamp(target, 0.25 * weight, 4.0 * weight), 1e-6, 1e6);
          tau = eta / weight;
          sigma = eta * weight;
          kgbar = kg;
        }
        g_anchor = g;
        y_anchor = y;
      }

      if (it % params_.gap_every == 0 || it == params_.max_iters) {
        const double gap = std::max(0.0, objective - dual_lower_bound(y, g, kg));
        const double rel = gap / scale;
        res.gap_trace.push_back(rel);
        if (rel <= params_.gap_tol) {
          res.status = SolverStatus::Converged;
          break;
        }
      }
    }

    res.recovered = Signal(std::move(g), sg_);
    res.residual_l1 = objective;
    return res;
  }

 private:
  double primal(const CVec& kg) const {
    double s = 0.0;
    for (std::size_t c = 0; c < kg.size(); ++c) {
      if (keep_[c]) s += std::abs(data_[c] - kg[c]);
    }
    return s * grid_.cell_area();
  }

  // Lower bound on the optimal value from two dual candidates: the iterate y, and the
  // normalized residual (V g - G)/|V g - G| with y filling cells where the residual vanishes.
  double dual_lower_bound(const CVec& y, const CVec& g, const CVec& kg) {
    const std::size_t m = grid_.size();
    double rmax = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      if (keep_[c]) rmax = std::max(rmax, std::abs(kg[c] - data_[c]));
    }
    CVec ys(m);
    for (std::size_t c = 0; c < m; ++c) {
      if (!keep_[c]) continue;
      const Complex r = kg[c] - data_[c];
      const double a = std::abs(r);
      ys[c] = a > 1e-9 * rmax ? r / a : y[c];
    }
    return std::max(certificate(y, g, cg_state_), certificate(ys, g, cg_state_sign_));
  }

  // Projects y onto {supp y in keep, V* y = 0}, rescales into the unit ball, and charges
  // the leftover ||V* y_f|| (inexact CG) against ||g||.
  double certificate(const CVec& y, const CVec& g, CVec& z) {
    const std::size_t n = sg_.n;
    const std::size_t m = grid_.size();
    CVec rhs(n);
    op_.apply_adjoint(y, rhs);

    // Preconditioned CG on (V* W V) z = V* y, warm-started from the previous solve.
    CVec wz(m), az(n);
    auto apply_normal = [&](const CVec& in, CVec& out) {
      op_.apply(in, wz);
      for (std::size_t c = 0; c < m; ++c) {
        if (!keep_[c]) wz[c] = Complex{};
      }
      op_.apply_adjoint(wz, out);
    };
    apply_normal(z, az);
    CVec r(n), p(n), s(n), ap(n);
    for (std::size_t k = 0; k < n; ++k) r[k] = rhs[k] - az[k];
    const double rhs_norm = std::sqrt(sq_norm(rhs));
    for (std::size_t k = 0; k < n; ++k) s[k] = r[k] / precond_[k];
    p = s;
    double rs = dot_re(r, s);
    for (int it = 0; it < params_.cg_iters && std::sqrt(sq_norm(r)) > params_.cg_tol * rhs_norm; ++it) {
      apply_normal(p, ap);
      const double pap = dot_re(p, ap);
      if (!(pap > 0.0)) break;
      const double alpha = rs / pap;
      for (std::size_t k = 0; k < n; ++k) {
        z[k] += alpha * p[k];
        r[k] -= alpha * ap[k];
      }
      for (std::size_t k = 0; k < n; ++k) s[k] = r[k] / precond_[k];
      const double rs_new = dot_re(r, s);
      const double beta = rs_new / rs;
      rs = rs_new;
      for (std::size_t k = 0; k < n; ++k) p[k] = s[k] + beta * p[k];
    }

    CVec yf(m);
    op_.apply(z, wz);
    double peak = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      yf[c] = keep_[c] ? y[c] - wz[c] : Complex{};
      peak = std::max(peak, std::abs(yf[c]));
    }
    if (peak <= 1.0) return bound_of(yf, g);
    // Either shrink uniformly (keeps V* y_f small) or clip cell by cell (keeps the pairing).
    CVec clipped(yf);
    for (auto& v : clipped) {
      const double a = std::abs(v);
      if (a > 1.0) v /= a;
    }
    for (auto& v : yf) v /= peak;
    return std::max(bound_of(yf, g), bound_of(clipped, g));
  }

  // -Re<y, G> dA - ||V* y|| ||g||, valid for |y| <= 1 supported on the kept cells.
  double bound_of(const CVec& y, const CVec& g) const {
    CVec leak_vec(sg_.n);
    op_.apply_adjoint(y, leak_vec);
    const double leak = std::sqrt(sq_norm(leak_vec) * sg_.dt) * std::sqrt(sq_norm(g) * sg_.dt);
    double pairing = 0.0;
    for (std::size_t c = 0; c < y.size(); ++c) {
      if (keep_[c]) pairing += y[c].real() * data_[c].real() + y[c].imag() * data_[c].imag();
    }
    return -pairing * grid_.cell_area() - leak;
  }

  CVec data_;
  std::vector<std::uint8_t> keep_;
  SignalGeometry sg_;
  TFGrid grid_;
  SolverParams params_;
  StftOperator op_;
  std::vector<double> precond_;
  CVec cg_state_;
  CVec cg_state_sign_;
};

}  // namespace

void SolverParams::validate() const {
  if (max_iters < 1) throw InvalidArgument("solver: max_iters must be positive");
  if (!(gap_tol > 0.0)) throw InvalidArgument("solver: gap_tol must be positive");
  if (!(step_ratio > 0.0) || !(step_ratio < 1.0)) {
    throw InvalidArgument("solver: step_ratio = tau*sigma*L^2 must lie in (0, 1)");
  }
  if (op_norm_iters < 1) throw InvalidArgument("solver: op_norm_iters must be positive");
  if (gap_every < 1) throw InvalidArgument("solver: gap_every must be positive");
  if (cg_iters < 0) throw InvalidArgument("solver: cg_iters must be nonnegative");
  if (restart_every < 0) throw InvalidArgument("solver: restart_every must be nonnegative");
}

std::string to_string(SolverStatus s) { return s == SolverStatus::Converged ? "converged" : "max_iters"; }

double op_norm_power(const SignalGeometry& geometry, const TFGrid& grid, int iters, std::uint64_t seed) {
  if (iters < 10) throw InvalidArgument("op_norm_power: at least 10 iterations required");
  return power_norm(StftOperator(geometry, grid), iters, seed);
}

RecoveryResult denoise_l1(const TFRepr& observed, const SignalGeometry& geometry, const SolverParams& params) {
  std::vector<std::uint8_t> keep(observed.grid().size(), 1);
  return WeightedL1Solver(observed, std::move(keep), geometry, params).run();
}

RecoveryResult inpaint_l1(const TFRepr& observed, const Mask& missing, const SignalGeometry& geometry,
                          const SolverParams& params) {
  if (!(missing.grid() == observed.grid())) throw GeometryError("inpaint_l1: mask grid does not match");
  auto keep = missing.complement().cells();
  if (std::find(keep.begin(), keep.end(), std::uint8_t{1}) == keep.end()) {
    throw InvalidArgument("inpaint_l1: the missing region covers the whole grid");
  }
  return WeightedL1Solver(observed, std::move(keep), geometry, params).run();
}

double denoise_threshold(double R) { return 0.5 * -std::expm1(-std::numbers::pi / (R * R)); }

double inpaint_threshold(double R) { return -std::expm1(-std::numbers::pi / (R * R)); }

std::optional<double> missing_data_bound(double epsilon, double rho, double R) {
  if (!(R > 0.0)) throw InvalidArgument("missing_data_bound: R must be positive");
  const double c = inpaint_threshold(R);
  if (!(rho < c)) return std::nullopt;
  return 2.0 * epsilon * c / (c - rho);
}

}  // namespace psieve
