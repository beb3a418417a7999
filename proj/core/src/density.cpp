#include "psieve/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "psieve/stft.hpp"

namespace psieve {

namespace {

constexpr double kPi = std::numbers::pi;

bool cell_in_disc(double ux, double uw, double dx, double dw, double r, RasterMode mode) {
  if (mode == RasterMode::CenterIn) return ux * ux + uw * uw <= r * r;
  const double ex = std::max(0.0, std::abs(ux) - 0.5 * dx);
  const double ew = std::max(0.0, std::abs(uw) - 0.5 * dw);
  return ex * ex + ew * ew <= r * r;
}

void check_subdivision(int s) {
  if (s != 1 && s != 2) throw InvalidArgument("density: center_subdivision must be 1 or 2");
}

// Padding (in cells) of the disc-center lattice around the grid.
std::ptrdiff_t pad_cells(double r, double step) { return static_cast<std::ptrdiff_t>(std::ceil(r / step)); }

}  // namespace

std::size_t DiscStencil::count() const {
  return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), std::uint8_t{1}));
}

DiscStencil disc_raster(double R, const TFGrid& grid, RasterMode mode, double center_x, double center_w) {
  if (!(R > 0.0)) throw InvalidArgument("disc_raster: R must be positive");
  grid.validate();
  const double r = 1.0 / R;
  if (r < std::max(grid.dx, grid.dw)) throw GeometryError("disc_raster: disc is smaller than one cell");

  DiscStencil s;
  s.cell_area = grid.cell_area();
  s.half_x = static_cast<std::ptrdiff_t>(std::ceil(r / grid.dx + 0.5 + std::abs(center_x)));
  s.half_w = static_cast<std::ptrdiff_t>(std::ceil(r / grid.dw + 0.5 + std::abs(center_w)));
  const auto rows = static_cast<std::size_t>(2 * s.half_x + 1);
  const auto cols = static_cast<std::size_t>(2 * s.half_w + 1);
  s.cells.assign(rows * cols, 0);
  s.q_lo.assign(rows, 1);
  s.q_hi.assign(rows, 0);
  for (std::ptrdiff_t p = -s.half_x; p <= s.half_x; ++p) {
    const auto pr = static_cast<std::size_t>(p + s.half_x);
    bool open = false;
    bool closed = false;
    for (std::ptrdiff_t q = -s.half_w; q <= s.half_w; ++q) {
      const double ux = (static_cast<double>(p) - center_x) * grid.dx;
      const double uw = (static_cast<double>(q) - center_w) * grid.dw;
      const bool in = cell_in_disc(ux, uw, grid.dx, grid.dw, r, mode);
      s.cells[pr * cols + static_cast<std::size_t>(q + s.half_w)] = in ? 1 : 0;
      if (in) {
        if (closed) throw Error("disc_raster: non-convex row");
        if (!open) s.q_lo[pr] = q;
        s.q_hi[pr] = q;
        open = true;
      } else if (open) {
        closed = true;
      }
    }
  }
  return s;
}

DensityReport nyquist_density(const Mask& mask, double R, const DensityOptions& options) {
  check_subdivision(options.center_subdivision);
  const auto& g = mask.grid();
  const double r = 1.0 / R;
  const int sub = options.center_subdivision;

  // Row prefix sums: pre[i * (nw+1) + j] = number of set cells in row i with index < j.
  const std::size_t stride = g.nw + 1;
  std::vector<std::uint32_t> pre(g.nx * stride, 0);
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.nw; ++j) {
      pre[i * stride + j + 1] = pre[i * stride + j] + (mask.at(i, j) ? 1u : 0u);
    }
  }

  std::vector<DiscStencil> stencils;
  for (int k = 0; k < sub; ++k) {
    for (int l = 0; l < sub; ++l) {
      stencils.push_back(disc_raster(R, g, options.mode, static_cast<double>(k) / sub, static_cast<double>(l) / sub));
    }
  }

  const auto nx = static_cast<std::ptrdiff_t>(g.nx);
  const auto nw = static_cast<std::ptrdiff_t>(g.nw);
  const std::ptrdiff_t pad_x = pad_cells(r, g.dx);
  const std::ptrdiff_t pad_w = pad_cells(r, g.dw);

  std::size_t best = 0;
  std::ptrdiff_t best_ai = -pad_x * sub;
  std::ptrdiff_t best_aj = -pad_w * sub;
  bool first = true;
  for (std::ptrdiff_t ai = -pad_x * sub; ai <= (nx - 1 + pad_x) * sub; ++ai) {
    const std::ptrdiff_t bi = ai >= 0 ? ai / sub : -((-ai + sub - 1) / sub);
    const auto k = static_cast<std::size_t>(ai - bi * sub);
    for (std::ptrdiff_t aj = -pad_w * sub; aj <= (nw - 1 + pad_w) * sub; ++aj) {
      const std::ptrdiff_t bj = aj >= 0 ? aj / sub : -((-aj + sub - 1) / sub);
      const auto l = static_cast<std::size_t>(aj - bj * sub);
      const auto& st = stencils[k * static_cast<std::size_t>(sub) + l];
      std::size_t count = 0;
      for (std::ptrdiff_t p = -st.half_x; p <= st.half_x; ++p) {
        const std::ptrdiff_t row = bi + p;
        if (row < 0 || row >= nx) continue;
        const auto pr = static_cast<std::size_t>(p + st.half_x);
        const std::ptrdiff_t c0 = std::max<std::ptrdiff_t>(bj + st.q_lo[pr], 0);
        const std::ptrdiff_t c1 = std::min<std::ptrdiff_t>(bj + st.q_hi[pr], nw - 1);
        if (c0 > c1) continue;
        const std::uint32_t* pr_row = pre.data() + static_cast<std::size_t>(row) * stride;
        count += pr_row[c1 + 1] - pr_row[c0];
      }
      if (first || count > best) {
        best = count;
        best_ai = ai;
        best_aj = aj;
        first = false;
      }
    }
  }

  DensityReport rep;
  rep.R = R;
  rep.count = best;
  rep.rho = static_cast<double>(best) * g.cell_area();
  rep.measure = mask.measure();
  rep.bound = sieve_bound(rep.rho, R);
  rep.center_i = static_cast<double>(best_ai) / sub;
  rep.center_j = static_cast<double>(best_aj) / sub;
  rep.center_x = g.x0 + rep.center_i * g.dx;
  rep.center_w = g.w0 + rep.center_j * g.dw;
  return rep;
}

double lambda_weight(const Mask& mask, double R, double scale, RasterMode mode) {
  const auto& g = mask.grid();
  const auto st = disc_raster(R, g, mode);
  const double r = 1.0 / R;

  // Per-cell integrand exp(pi|z|^2/2) * (scale * exp(-pi|z|^2/2)) * dA of the mask measure.
  std::vector<double> cell(g.size(), 0.0);
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.nw; ++j) {
      if (!mask.at(i, j)) continue;
      const double a = 0.5 * kPi * (g.x(i) * g.x(i) + g.w(j) * g.w(j));
      if (a > 700.0) throw GeometryError("lambda_weight: Gaussian weight overflows on this grid");
      const double density = scale * std::exp(-a);
      cell[g.index(i, j)] = std::exp(a) * density * g.cell_area();
    }
  }

  const auto nx = static_cast<std::ptrdiff_t>(g.nx);
  const auto nw = static_cast<std::ptrdiff_t>(g.nw);
  const std::ptrdiff_t pad_x = pad_cells(r, g.dx);
  const std::ptrdiff_t pad_w = pad_cells(r, g.dw);
  double best = 0.0;
  for (std::ptrdiff_t ci = -pad_x; ci <= nx - 1 + pad_x; ++ci) {
    for (std::ptrdiff_t cj = -pad_w; cj <= nw - 1 + pad_w; ++cj) {
      double acc = 0.0;
      for (std::ptrdiff_t p = -st.half_x; p <= st.half_x; ++p) {
        const std::ptrdiff_t row = ci + p;
        if (row < 0 || row >= nx) continue;
        const auto pr = static_cast<std::size_t>(p + st.half_x);
        const std::ptrdiff_t c0 = std::max<std::ptrdiff_t>(cj + st.q_lo[pr], 0);
        const std::ptrdiff_t c1 = std::min<std::ptrdiff_t>(cj + st.q_hi[pr], nw - 1);
        const double* crow = cell.data() + static_cast<std::size_t>(row) * g.nw;
        for (std::ptrdiff_t c = c0; c <= c1; ++c) acc += crow[c];
      }
      best = std::max(best, acc);
    }
  }
  return best;
}

double sieve_bound(double rho, double R) {
  if (!(R > 0.0)) throw InvalidArgument("sieve_bound: R must be positive");
  if (rho < 0.0) throw InvalidArgument("sieve_bound: rho must be nonnegative");
  return rho / -std::expm1(-kPi / (R * R));
}

std::vector<double> default_R_grid() {
  std::vector<double> out(33);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = 0.25 * std::pow(16.0, static_cast<double>(k) / 32.0);
  }
  return out;
}

bool admissible_R(const TFGrid& grid, double R) { return R > 0.0 && 1.0 / R >= std::max(grid.dx, grid.dw); }

OptimizeResult optimize_R(const Mask& mask, const std::vector<double>& R_grid, RasterMode mode) {
  if (R_grid.empty()) throw InvalidArgument("optimize_R: empty R grid");
  OptimizeResult best;
  bool found = false;
  for (double R : R_grid) {
    if (!admissible_R(mask.grid(), R)) continue;
    const auto rep = nyquist_density(mask, R, {mode, 1});
    if (!found || rep.bound < best.bound || (rep.bound == best.bound && R < best.R)) {
      best = {R, rep.bound, rep.rho};
      found = true;
    }
  }
  if (!found) throw GeometryError("optimize_R: no admissible R for this grid");
  return best;
}

TFRepr restrict_to(const TFRepr& v, const Mask& mask) {
  if (!(v.grid() == mask.grid())) throw GeometryError("restrict_to: mask grid does not match");
  std::vector<Complex> out(v.values());
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (mask.cells()[k] == 0) out[k] = Complex{};
  }
  return TFRepr(v.grid(), std::move(out));
}

double masked_l1(const TFRepr& v, const Mask& mask) {
  if (!(v.grid() == mask.grid())) throw GeometryError("masked_l1: mask grid does not match");
  double acc = 0.0;
  for (std::size_t k = 0; k < v.values().size(); ++k) {
    if (mask.cells()[k] != 0) acc += std::abs(v.values()[k]);
  }
  return acc * v.grid().cell_area();
}

double empirical_delta(const Mask& mask, const std::vector<Signal>& testset) {
  if (testset.empty()) throw InvalidArgument("empirical_delta: empty test set");
  double best = 0.0;
  for (const auto& f : testset) {
    const auto v = stft(f, mask.grid());
    const double total = tf_norm(v, Norm::L1);
    if (!(total > 0.0)) throw InvalidArgument("empirical_delta: signal with zero STFT norm");
    best = std::max(best, masked_l1(v, mask) / total);
  }
  return best;
}

Theorem1Report verify_theorem1(const TFRepr& v, const Mask& mask, double rho_outer, double R, double slack) {
  const double total = tf_norm(v, Norm::L1);
  if (!(total > 0.0)) throw InvalidArgument("verify_theorem1: zero signal");
  Theorem1Report rep;
  rep.rho = rho_outer;
  rep.lhs = masked_l1(v, mask);
  rep.rhs = sieve_bound(rho_outer, R) * total;
  if (rep.rhs > 0.0) {
    rep.ratio = rep.lhs / rep.rhs;
  } else {
    rep.ratio = rep.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  rep.pass = rep.lhs <= rep.rhs * (1.0 + slack);
  return rep;
}

Theorem1Report verify_theorem1(const Signal& f, const Mask& mask, double R, double slack) {
  const auto v = stft(f, mask.grid());
  const double rho = nyquist_density(mask, R, {RasterMode::Outer, 1}).rho;
  return verify_theorem1(v, mask, rho, R, slack);
}

UncertaintyReport uncertainty_check(const TFRepr& v, const Mask& mask, const OptimizeResult& best, double slack) {
  const double total = tf_norm(v, Norm::L1);
  if (!(total > 0.0)) throw InvalidArgument("uncertainty_check: zero signal");
  UncertaintyReport rep;
  rep.epsilon = 1.0 - masked_l1(v, mask) / total;
  rep.inf_bound = best.bound;
  rep.best_R = best.R;
  rep.measure = mask.measure();
  rep.pass = (1.0 - rep.epsilon) <= rep.inf_bound * (1.0 + slack) && rep.inf_bound <= rep.measure * (1.0 + slack);
  return rep;
}

UncertaintyReport uncertainty_check(const Signal& f, const Mask& mask, const std::vector<double>& R_grid,
                                    double slack) {
  const auto v = stft(f, mask.grid());
  return uncertainty_check(v, mask, optimize_R(mask, R_grid, RasterMode::Outer), slack);
}

}  // namespace psieve
