#include "psieve/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace psieve {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t flip_index(const TFGrid& g, std::size_t j) { return g.nw - 1 - j; }

void require_symmetric(const TFGrid& g) {
  if (!g.frequency_symmetric()) {
    throw GeometryError("bargmann: frequency axis must be symmetric about 0");
  }
}

// Antiderivative of sqrt(r^2 - x^2) on [-r, r].
double half_chord_integral(double x, double r) {
  x = std::clamp(x, -r, r);
  return 0.5 * (x * std::sqrt(std::max(0.0, r * r - x * x)) + r * r * std::asin(x / r));
}

// Quadrature weights of the disc kernel on the lattice offsets (p, q), |p| <= P, |q| <= Q:
// covered area of the cell around (p dx, q dw) times exp(-pi |u|^2 / 2).
struct KernelTable {
  std::ptrdiff_t P = 0;
  std::ptrdiff_t Q = 0;
  std::vector<double> weight;           // (2P+1) x (2Q+1)
  std::vector<std::ptrdiff_t> q_lo, q_hi;  // nonzero range per p

  double at(std::ptrdiff_t p, std::ptrdiff_t q) const {
    return weight[static_cast<std::size_t>((p + P) * (2 * Q + 1) + (q + Q))];
  }
};

KernelTable make_kernel(const TFGrid& g, double r) {
  KernelTable k;
  k.P = static_cast<std::ptrdiff_t>(std::ceil(r / g.dx + 0.5));
  k.Q = static_cast<std::ptrdiff_t>(std::ceil(r / g.dw + 0.5));
  const auto cols = static_cast<std::size_t>(2 * k.Q + 1);
  k.weight.assign(static_cast<std::size_t>(2 * k.P + 1) * cols, 0.0);
  k.q_lo.assign(static_cast<std::size_t>(2 * k.P + 1), 1);
  k.q_hi.assign(static_cast<std::size_t>(2 * k.P + 1), 0);
  for (std::ptrdiff_t p = -k.P; p <= k.P; ++p) {
    for (std::ptrdiff_t q = -k.Q; q <= k.Q; ++q) {
      const double ux = static_cast<double>(p) * g.dx;
      const double uw = static_cast<double>(q) * g.dw;
      const double area = rect_disc_area(ux - 0.5 * g.dx, ux + 0.5 * g.dx, uw - 0.5 * g.dw, uw + 0.5 * g.dw, r);
      if (area <= 0.0) continue;
      const double w = area * std::exp(-0.5 * kPi * (ux * ux + uw * uw));
      k.weight[static_cast<std::size_t>(p + k.P) * cols + static_cast<std::size_t>(q + k.Q)] = w;
      auto& lo = k.q_lo[static_cast<std::size_t>(p + k.P)];
      auto& hi = k.q_hi[static_cast<std::size_t>(p + k.P)];
      if (lo > hi) {
        lo = q;
        hi = q;
      } else {
        lo = std::min(lo, q);
        hi = std::max(hi, q);
      }
    }
  }
  return k;
}

void check_kernel_fits(const TFGrid& g, double r) {
  const double ext = std::min(static_cast<double>(g.nx - 1) * g.dx, static_cast<double>(g.nw - 1) * g.dw);
  if (2.0 * r > ext) throw GeometryError("fock_convolve: disc diameter exceeds the grid extent");
}

// Evaluates the twisted convolution at every point of one time row a.
class RowConvolver {
 public:
  RowConvolver(const FockRepr& f, const KernelTable& k) : f_(f), k_(k) {
    const auto& g = f.grid();
    const auto pw = static_cast<std::size_t>(2 * k.P + 1);
    col_phase_.resize(g.nw * pw);
    for (std::size_t b = 0; b < g.nw; ++b) {
      for (std::ptrdiff_t p = -k.P; p <= k.P; ++p) {
        col_phase_[b * pw + static_cast<std::size_t>(p + k.P)] =
            std::polar(1.0, -kPi * g.w(b) * static_cast<double>(p) * g.dx);
      }
    }
    weighted_.resize(k.weight.size());
  }

  void set_row(std::size_t a) {
    const auto& g = f_.grid();
    const auto cols = static_cast<std::size_t>(2 * k_.Q + 1);
    std::vector<Complex> row_phase(cols);
    for (std::ptrdiff_t q = -k_.Q; q <= k_.Q; ++q) {
      row_phase[static_cast<std::size_t>(q + k_.Q)] = std::polar(1.0, kPi * g.x(a) * static_cast<double>(q) * g.dw);
    }
    for (std::size_t idx = 0; idx < k_.weight.size(); ++idx) {
      weighted_[idx] = k_.weight[idx] * row_phase[idx % cols];
    }
    row_ = a;
  }

  Complex at(std::size_t b) const {
    const auto& g = f_.grid();
    const auto cols = static_cast<std::size_t>(2 * k_.Q + 1);
    const auto pw = static_cast<std::size_t>(2 * k_.P + 1);
    const auto a = static_cast<std::ptrdiff_t>(row_);
    const auto bb = static_cast<std::ptrdiff_t>(b);
    const auto nx = static_cast<std::ptrdiff_t>(g.nx);
    const auto nw = static_cast<std::ptrdiff_t>(g.nw);
    const Complex* vals = f_.values().data();
    Complex acc{};
    for (std::ptrdiff_t p = -k_.P; p <= k_.P; ++p) {
      const std::ptrdiff_t src_row = a - p;
      if (src_row < 0 || src_row >= nx) continue;
      const auto pi = static_cast<std::size_t>(p + k_.P);
      const std::ptrdiff_t q0 = std::max(k_.q_lo[pi], bb - nw + 1);
      const std::ptrdiff_t q1 = std::min(k_.q_hi[pi], bb);
      if (q0 > q1) continue;
      const Complex* wrow = weighted_.data() + pi * cols;
      const Complex* frow = vals + static_cast<std::size_t>(src_row) * g.nw;
      Complex inner{};
      for (std::ptrdiff_t q = q0; q <= q1; ++q) {
        inner += wrow[q + k_.Q] * frow[bb - q];
      }
      acc += col_phase_[b * pw + pi] * inner;
    }
    return acc;
  }

 private:
  const FockRepr& f_;
  const KernelTable& k_;
  std::vector<Complex> col_phase_;
  std::vector<Complex> weighted_;
  std::size_t row_ = 0;
};

}  // namespace

FockRepr bargmann_from_stft(const TFRepr& v) {
  const auto& g = v.grid();
  require_symmetric(g);
  std::vector<Complex> out(g.size());
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.nw; ++j) {
      out[g.index(i, j)] = std::polar(1.0, -kPi * g.x(i) * g.w(j)) * v.at(i, flip_index(g, j));
    }
  }
  return FockRepr(g, std::move(out));
}

TFRepr stft_from_bargmann(const FockRepr& f) {
  const auto& g = f.grid();
  require_symmetric(g);
  std::vector<Complex> out(g.size());
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.nw; ++j) {
      // V(x, w) = exp(i pi x (-w)) F~(x - i w)
      const std::size_t jf = flip_index(g, j);
      out[g.index(i, j)] = std::polar(1.0, kPi * g.x(i) * g.w(jf)) * f.at(i, jf);
    }
  }
  return TFRepr(g, std::move(out));
}

bool is_lattice_shift(const TFGrid& grid, Complex w) {
  const double a = w.real() / grid.dx;
  const double b = w.imag() / grid.dw;
  return std::abs(a - std::round(a)) <= 1e-9 && std::abs(b - std::round(b)) <= 1e-9;
}

FockRepr translate_fock(const FockRepr& f, Complex w, double max_lost_fraction) {
  const auto& g = f.grid();
  const double sx = w.real() / g.dx;
  const double sw = w.imag() / g.dw;
  const auto nx = static_cast<double>(g.nx);
  const auto nw = static_cast<double>(g.nw);

  double total = 0.0;
  double lost = 0.0;
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.nw; ++j) {
      const double m = std::abs(f.at(i, j));
      total += m;
      const double di = static_cast<double>(i) + sx;
      const double dj = static_cast<double>(j) + sw;
      if (di < -1e-9 || di > nx - 1.0 + 1e-9 || dj < -1e-9 || dj > nw - 1.0 + 1e-9) lost += m;
    }
  }
  if (total > 0.0 && lost > max_lost_fraction * total) {
    throw GeometryError("translate_fock: shift moves too much mass off the grid");
  }

  const bool lattice = is_lattice_shift(g, w);
  const auto si = static_cast<std::ptrdiff_t>(std::llround(sx));
  const auto sj = static_cast<std::ptrdiff_t>(std::llround(sw));
  std::vector<Complex> out(g.size());
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.nw; ++j) {
      const double x = g.x(i);
      const double om = g.w(j);
      // Im(conj(w) z) with z = x + i om.
      const Complex phase = std::polar(1.0, kPi * (w.real() * om - w.imag() * x));
      Complex src{};
      if (lattice) {
        const auto a = static_cast<std::ptrdiff_t>(i) - si;
        const auto b = static_cast<std::ptrdiff_t>(j) - sj;
        if (a >= 0 && b >= 0 && a < static_cast<std::ptrdiff_t>(g.nx) && b < static_cast<std::ptrdiff_t>(g.nw)) {
          src = f.at(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
        }
      } else {
        const double a = static_cast<double>(i) - sx;
        const double b = static_cast<double>(j) - sw;
        const double a0 = std::floor(a);
        const double b0 = std::floor(b);
        const double fa = a - a0;
        const double fb = b - b0;
        auto sample = [&](double ii, double jj) -> Complex {
          if (ii < 0.0 || jj < 0.0 || ii > nx - 1.0 || jj > nw - 1.0) return {};
          return f.at(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj));
        };
        src = (1.0 - fa) * (1.0 - fb) * sample(a0, b0) + fa * (1.0 - fb) * sample(a0 + 1.0, b0) +
              (1.0 - fa) * fb * sample(a0, b0 + 1.0) + fa * fb * sample(a0 + 1.0, b0 + 1.0);
      }
      out[g.index(i, j)] = phase * src;
    }
  }
  return FockRepr(g, std::move(out));
}

double disc_gaussian_mass(double R) {
  if (!(R > 0.0)) throw InvalidArgument("R must be positive");
  return -std::expm1(-kPi / (R * R));
}

double rect_disc_area(double x1, double x2, double y1, double y2, double r) {
  const double a = std::max(x1, -r);
  const double b = std::min(x2, r);
  if (!(a < b) || !(y1 < y2)) return 0.0;

  std::vector<double> cuts{a, b};
  for (double y : {y1, y2}) {
    if (std::abs(y) < r) {
      const double c = std::sqrt(r * r - y * y);
      for (double x : {-c, c}) {
        if (x > a && x < b) cuts.push_back(x);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());

  double area = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k];
    const double hi = cuts[k + 1];
    if (!(hi > lo)) continue;
    const double mid = 0.5 * (lo + hi);
    const double s = std::sqrt(std::max(0.0, r * r - mid * mid));
    const bool top_const = y2 < s;
    const bool bot_const = y1 > -s;
    const double top_mid = top_const ? y2 : s;
    const double bot_mid = bot_const ? y1 : -s;
    if (top_mid <= bot_mid) continue;
    const double chord = half_chord_integral(hi, r) - half_chord_integral(lo, r);
    const double top = top_const ? y2 * (hi - lo) : chord;
    const double bot = bot_const ? y1 * (hi - lo) : -chord;
    area += top - bot;
  }
  return area;
}

FockRepr fock_convolve(const FockRepr& f, const DiscKernel& kernel) {
  const auto& g = f.grid();
  const double r = kernel.radius();
  check_kernel_fits(g, r);
  const auto table = make_kernel(g, r);
  RowConvolver conv(f, table);
  std::vector<Complex> out(g.size());
  for (std::size_t a = 0; a < g.nx; ++a) {
    conv.set_row(a);
    for (std::size_t b = 0; b < g.nw; ++b) out[g.index(a, b)] = conv.at(b);
  }
  return FockRepr(g, std::move(out));
}

std::vector<Complex> fock_convolve_at(const FockRepr& f, const DiscKernel& kernel,
                                      const std::vector<GridPoint>& points) {
  const auto& g = f.grid();
  const double r = kernel.radius();
  check_kernel_fits(g, r);
  const auto table = make_kernel(g, r);
  RowConvolver conv(f, table);

  std::vector<std::size_t> order(points.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t m) { return points[l].i < points[m].i; });

  std::vector<Complex> out(points.size());
  std::size_t current = g.nx;
  for (std::size_t k : order) {
    const auto& p = points[k];
    if (p.i >= g.nx || p.j >= g.nw) throw InvalidArgument("fock_convolve_at: point outside grid");
    if (p.i != current) {
      conv.set_row(p.i);
      current = p.i;
    }
    out[k] = conv.at(p.j);
  }
  return out;
}

ReproducingReport local_reproducing_check(const FockRepr& f, double R, const std::vector<GridPoint>& probes) {
  const auto& g = f.grid();
  const double r = 1.0 / R;
  const double c = disc_gaussian_mass(R);
  const auto P = static_cast<std::size_t>(std::ceil(r / g.dx + 0.5));
  const auto Q = static_cast<std::size_t>(std::ceil(r / g.dw + 0.5));
  for (const auto& p : probes) {
    if (p.i < P || p.j < Q || p.i + P >= g.nx || p.j + Q >= g.nw) {
      throw GeometryError("local_reproducing_check: probe too close to the grid boundary");
    }
  }

  double scale = 0.0;
  for (const auto& v : f.values()) scale = std::max(scale, std::abs(v));

  ReproducingReport rep;
  rep.residuals.assign(probes.size(), 0.0);
  if (scale == 0.0 || probes.empty()) return rep;

  const auto conv = fock_convolve_at(f, DiscKernel{R}, probes);
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const double res = std::abs(f.at(probes[k].i, probes[k].j) - conv[k] / c) / scale;
    rep.residuals[k] = res;
    rep.max_residual = std::max(rep.max_residual, res);
  }
  return rep;
}

std::vector<GridPoint> probes_within(const TFGrid& grid, double radius, std::size_t stride) {
  if (stride == 0) throw InvalidArgument("probes_within: stride must be positive");
  std::vector<GridPoint> out;
  for (std::size_t i = 0; i < grid.nx; i += stride) {
    for (std::size_t j = 0; j < grid.nw; j += stride) {
      const double x = grid.x(i);
      const double w = grid.w(j);
      if (x * x + w * w <= radius * radius) out.push_back({i, j});
    }
  }
  return out;
}

}  // namespace psieve
