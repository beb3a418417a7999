#include "psieve/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "lp_simplex.hpp"
#include "psieve/fock.hpp"
#include "psieve/stft.hpp"

namespace psieve::oracle {

namespace {

constexpr double kPi = std::numbers::pi;

double window(double t) { return std::pow(2.0, 0.25) * std::exp(-kPi * t * t); }

bool inside_disc(double ux, double uw, double dx, double dw, double r, RasterMode mode) {
  if (mode == RasterMode::CenterIn) return ux * ux + uw * uw <= r * r;
  const double ex = std::max(0.0, std::abs(ux) - 0.5 * dx);
  const double ew = std::max(0.0, std::abs(uw) - 0.5 * dw);
  return ex * ex + ew * ew <= r * r;
}

}  // namespace

std::vector<Complex> DenseOperator::apply(const std::vector<Complex>& f) const {
  if (f.size() != cols) throw GeometryError("DenseOperator::apply: size mismatch");
  std::vector<Complex> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    Complex s{};
    for (std::size_t c = 0; c < cols; ++c) s += at(r, c) * f[c];
    out[r] = s;
  }
  return out;
}

std::vector<Complex> DenseOperator::apply_adjoint(const std::vector<Complex>& v) const {
  if (v.size() != rows) throw GeometryError("DenseOperator::apply_adjoint: size mismatch");
  std::vector<Complex> out(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[c] += std::conj(at(r, c)) * v[r];
  }
  for (auto& x : out) x *= dA / dt;
  return out;
}

DenseOperator dense_stft_operator(const SignalGeometry& geometry, const TFGrid& grid, std::size_t max_entries) {
  geometry.validate();
  grid.validate();
  if (grid.size() * geometry.n > max_entries) throw InvalidArgument("dense_stft_operator: operator too large");
  DenseOperator op;
  op.rows = grid.size();
  op.cols = geometry.n;
  op.dt = geometry.dt;
  op.dA = grid.cell_area();
  op.entries.resize(op.rows * op.cols);
  for (std::size_t i = 0; i < grid.nx; ++i) {
    for (std::size_t j = 0; j < grid.nw; ++j) {
      const std::size_t r = grid.index(i, j);
      for (std::size_t k = 0; k < geometry.n; ++k) {
        const double t = geometry.time(k);
        // Reduce w*t modulo 1 in long double before forming the phase.
        const long double wt = static_cast<long double>(grid.w(j)) * static_cast<long double>(t);
        const double frac = static_cast<double>(wt - std::floor(wt));
        op.entries[r * op.cols + k] = geometry.dt * window(t - grid.x(i)) * std::polar(1.0, -2.0 * kPi * frac);
      }
    }
  }
  return op;
}

std::vector<double> weighted_singular_values(const DenseOperator& op) {
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(op.rows), static_cast<Eigen::Index>(op.cols));
  const double w = std::sqrt(op.dA / op.dt);
  for (std::size_t r = 0; r < op.rows; ++r) {
    for (std::size_t c = 0; c < op.cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = w * op.at(r, c);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

namespace {

// Bisects until every panel's Gauss-Kronrod error estimate meets its share of abs_tol.
template <class F>
Complex adaptive_gk(const F& f, double a, double b, double abs_tol, int depth, double& err_total) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  double l1 = 0.0;
  const Complex r = gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &err, &l1);
  // With zero depth the estimate is reported on the reference interval [-1, 1].
  err *= 0.5 * (b - a);
  // Below the rounding floor of the panel further bisection cannot help.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * l1;
  if (err <= std::max(abs_tol, floor) || depth == 0) {
    err_total += err;
    return r;
  }
  const double mid = 0.5 * (a + b);
  return adaptive_gk(f, a, mid, 0.5 * abs_tol, depth - 1, err_total) +
         adaptive_gk(f, mid, b, 0.5 * abs_tol, depth - 1, err_total);
}

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

std::vector<Complex> quadrature_stft(const ContinuousSignal& f, const std::vector<std::pair<double, double>>& points,
                                     double abs_tol) {
  if (!f.f) throw InvalidArgument("quadrature_stft: empty function");
  if (!(f.t_max > f.t_min)) throw InvalidArgument("quadrature_stft: empty support");
  if (!(abs_tol > 0.0)) throw InvalidArgument("quadrature_stft: abs_tol must be positive");
  std::vector<Complex> out;
  out.reserve(points.size());
  for (const auto& [x, w] : points) {
    // phi(t - x) < 1e-80 beyond |t - x| = 8.
    const double a = std::max(f.t_min, x - 8.0);
    const double b = std::min(f.t_max, x + 8.0);
    Complex total{};
    double err_total = 0.0;
    if (b > a) {
      auto integrand = [&](double t) -> Complex {
        return f.f(t) * window(t - x) * std::polar(1.0, -2.0 * kPi * w * t);
      };
      total = adaptive_gk(integrand, a, b, 0.1 * abs_tol, 30, err_total);
    }
    if (!(err_total <= abs_tol)) {
      throw Error("quadrature_stft: accuracy " + fmt_g(err_total) + " not reached at (" + std::to_string(x) +
                  ", " + std::to_string(w) + ")");
    }
    out.push_back(total);
  }
  return out;
}

double dense_density_oracle(const Mask& mask, double R, RasterMode mode, int center_subdivision) {
  const auto& g = mask.grid();
  if (g.nx > 128 || g.nw > 128) throw InvalidArgument("dense_density_oracle: grid larger than 128 x 128");
  if (center_subdivision != 1 && center_subdivision != 2) {
    throw InvalidArgument("dense_density_oracle: center_subdivision must be 1 or 2");
  }
  if (!(R > 0.0)) throw InvalidArgument("dense_density_oracle: R must be positive");
  const double r = 1.0 / R;
  const auto sub = static_cast<std::ptrdiff_t>(center_subdivision);
  const auto pad_x = static_cast<std::ptrdiff_t>(std::ceil(r / g.dx));
  const auto pad_w = static_cast<std::ptrdiff_t>(std::ceil(r / g.dw));
  const auto nx = static_cast<std::ptrdiff_t>(g.nx);
  const auto nw = static_cast<std::ptrdiff_t>(g.nw);

  std::vector<std::pair<std::ptrdiff_t, std::ptrdiff_t>> set_cells;
  for (std::ptrdiff_t i = 0; i < nx; ++i) {
    for (std::ptrdiff_t j = 0; j < nw; ++j) {
      if (mask.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) set_cells.emplace_back(i, j);
    }
  }

  std::size_t best = 0;
  for (std::ptrdiff_t ai = -pad_x * sub; ai <= (nx - 1 + pad_x) * sub; ++ai) {
    const std::ptrdiff_t bi = static_cast<std::ptrdiff_t>(std::floor(static_cast<double>(ai) / sub));
    const double fx = static_cast<double>(ai - bi * sub) / static_cast<double>(sub);
    for (std::ptrdiff_t aj = -pad_w * sub; aj <= (nw - 1 + pad_w) * sub; ++aj) {
      const std::ptrdiff_t bj = static_cast<std::ptrdiff_t>(std::floor(static_cast<double>(aj) / sub));
      const double fw = static_cast<double>(aj - bj * sub) / static_cast<double>(sub);
      std::size_t count = 0;
      for (const auto& [i, j] : set_cells) {
        const double ux = (static_cast<double>(i - bi) - fx) * g.dx;
        const double uw = (static_cast<double>(j - bj) - fw) * g.dw;
        if (inside_disc(ux, uw, g.dx, g.dw, r, mode)) ++count;
      }
      best = std::max(best, count);
    }
  }
  return static_cast<double>(best) * g.cell_area();
}

double lp_facet_band() { return 1.0 / std::cos(kPi / kLpFacets) - 1.0; }

LpResult lp_l1_oracle(const DenseOperator& op, const TFRepr& data, const std::optional<Mask>& missing) {
  const auto& g = data.grid();
  if (g.size() != op.rows) throw GeometryError("lp_l1_oracle: data does not match the operator");
  if (missing && !(missing->grid() == g)) throw GeometryError("lp_l1_oracle: mask grid does not match");
  std::vector<std::size_t> kept;
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (!missing || !missing->cells()[c]) kept.push_back(c);
  }
  const std::size_t n = op.cols;
  const std::size_t m = kept.size();
  if (m == 0) throw InvalidArgument("lp_l1_oracle: no kept cells");
  if (2 * n + m > 200) throw InvalidArgument("lp_l1_oracle: more than 200 primal variables");

  // Primal: min sum_c dA s_c  s.t.  s_c >= b_ck - alpha_ck . x  for every facet k,
  // with x = (Re g, Im g), b_ck = Re(e^{-i theta_k} G_c), alpha_ck . x = Re(e^{-i theta_k} (V g)_c).
  // Solved through its dual: max b . lambda, sum_k lambda_ck = dA, sum lambda_ck alpha_ck = 0, lambda >= 0.
  const std::size_t facets = kLpFacets;
  detail::StandardLp lp;
  lp.rows = m + 2 * n;
  lp.cols = m * facets;
  lp.a.assign(lp.rows * lp.cols, 0.0);
  lp.b.assign(lp.rows, 0.0);
  lp.cost.assign(lp.cols, 0.0);
  const double dA = g.cell_area();
  for (std::size_t c = 0; c < m; ++c) lp.b[c] = dA;
  for (std::size_t c = 0; c < m; ++c) {
    const std::size_t cell = kept[c];
    for (std::size_t k = 0; k < facets; ++k) {
      const Complex rot = std::polar(1.0, -2.0 * kPi * static_cast<double>(k) / static_cast<double>(facets));
      const std::size_t col = c * facets + k;
      lp.cost[col] = -(rot * data.values()[cell]).real();
      lp.a[c * lp.cols + col] = 1.0;
      for (std::size_t l = 0; l < n; ++l) {
        const Complex beta = rot * op.at(cell, l);
        lp.a[(m + l) * lp.cols + col] = beta.real();
        lp.a[(m + n + l) * lp.cols + col] = -beta.imag();
      }
    }
  }

  const auto sol = detail::solve_simplex(lp);
  if (sol.status != detail::LpStatus::Optimal) throw Error("lp_l1_oracle: simplex did not reach an optimum");

  // With reduced costs cost - A^T pi >= 0, x = -pi_x and s = -pi_s is primal optimal.
  LpResult res;
  res.optimum = -sol.objective;
  res.pivots = sol.pivots;
  res.minimizer.resize(n);
  for (std::size_t l = 0; l < n; ++l) {
    res.minimizer[l] = Complex(-sol.multipliers[m + l], -sol.multipliers[m + n + l]);
  }
  const auto vg = op.apply(res.minimizer);
  double obj = 0.0;
  for (const std::size_t cell : kept) obj += std::abs(data.values()[cell] - vg[cell]);
  res.modulus_objective = obj * dA;
  return res;
}

NuReport nu_check(double R, const std::vector<FockRepr>& testset) {
  if (testset.empty()) throw InvalidArgument("nu_check: empty test set");
  NuReport rep;
  rep.constant = -std::expm1(-kPi / (R * R));
  for (const auto& f : testset) {
    const double denom = tf_norm(f, Norm::L1);
    if (!(denom > 0.0)) throw InvalidArgument("nu_check: zero test function");
    const double ratio = tf_norm(fock_convolve(f, DiscKernel{R}), Norm::L1) / denom;
    rep.ratios.push_back(ratio);
    const double dev = std::abs(ratio - rep.constant);
    rep.max_abs_deviation = std::max(rep.max_abs_deviation, dev);
    rep.max_rel_deviation = std::max(rep.max_rel_deviation, dev / rep.constant);
  }
  return rep;
}

}  // namespace psieve::oracle
