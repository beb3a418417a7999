#include "psieve/stft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"

namespace psieve {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// exp(-2 pi i a) with the integer part of a removed first.
Complex unit_phase(double a) {
  a -= std::round(a);
  return std::polar(1.0, -kTwoPi * a);
}

}  // namespace

Signal gaussian_window(std::size_t n, double dt, double center) {
  if (!(dt > 0.0)) throw InvalidArgument("gaussian_window: dt must be positive");
  if (static_cast<double>(n) * dt < 2.0 * kWindowCutoff) {
    throw InvalidArgument("gaussian_window: n*dt must be at least 12 to hold the window support");
  }
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  std::vector<Complex> s(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(static_cast<std::ptrdiff_t>(k) - half) * dt;
    s[k] = gaussian(t);
  }
  return Signal(std::move(s), dt, center - static_cast<double>(half) * dt);
}

struct StftOperator::Impl {
  SignalGeometry sig;
  TFGrid grid;
  std::vector<std::size_t> k_lo;   // first sample inside the window of row i
  std::vector<std::size_t> k_len;  // window sample count for row i
  std::vector<std::size_t> win_offset;
  std::vector<double> win;         // phi(t_k - x_i), concatenated over rows
  std::vector<Complex> pre;        // exp(-2 pi i w0 k dt)
  std::vector<Complex> post;       // exp(-2 pi i w_j t0)
  std::vector<std::size_t> bin;    // (j * m) mod n
  detail::FftPlan fwd;
  detail::FftPlan bwd;

  Impl(const SignalGeometry& s, const TFGrid& g)
      : sig(s), grid(g), fwd(s.n, detail::FftPlan::Direction::Forward),
        bwd(s.n, detail::FftPlan::Direction::Backward) {}
};

StftOperator::StftOperator(const SignalGeometry& signal, const TFGrid& grid) {
  signal.validate();
  grid.validate();

  const double ratio = grid.dw * static_cast<double>(signal.n) * signal.dt;
  const double m = std::round(ratio);
  if (m < 1.0 || std::abs(ratio - m) > 1e-9 * ratio) {
    throw GeometryError("stft: frequency step must be a multiple of 1/(n*dt)");
  }
  const double t_first = signal.t0;
  const double t_last = signal.t_last();
  if (grid.x0 < t_first - kWindowCutoff || grid.x_last() > t_last + kWindowCutoff) {
    throw GeometryError("stft: time grid extends beyond the window reach of the signal samples");
  }

  impl_ = std::make_unique<Impl>(signal, grid);
  auto& d = *impl_;
  const std::size_t n = signal.n;

  d.k_lo.resize(grid.nx);
  d.k_len.resize(grid.nx);
  d.win_offset.resize(grid.nx);
  for (std::size_t i = 0; i < grid.nx; ++i) {
    const double x = grid.x(i);
    const double lo = std::ceil((x - kWindowCutoff - signal.t0) / signal.dt);
    const double hi = std::floor((x + kWindowCutoff - signal.t0) / signal.dt);
    const auto k0 = static_cast<std::ptrdiff_t>(std::max(lo, 0.0));
    const auto k1 = static_cast<std::ptrdiff_t>(std::min(hi, static_cast<double>(n) - 1.0));
    d.k_lo[i] = static_cast<std::size_t>(k0);
    d.k_len[i] = k1 >= k0 ? static_cast<std::size_t>(k1 - k0 + 1) : 0;
    d.win_offset[i] = d.win.size();
    for (std::size_t q = 0; q < d.k_len[i]; ++q) {
      d.win.push_back(gaussian(signal.time(d.k_lo[i] + q) - x));
    }
  }

  d.pre.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    d.pre[k] = unit_phase(grid.w0 * static_cast<double>(k) * signal.dt);
  }
  const auto mi = static_cast<std::size_t>(m);
  d.post.resize(grid.nw);
  d.bin.resize(grid.nw);
  for (std::size_t j = 0; j < grid.nw; ++j) {
    d.post[j] = unit_phase(grid.w(j) * signal.t0);
    d.bin[j] = (j * mi) % n;
  }
}

StftOperator::~StftOperator() = default;
StftOperator::StftOperator(StftOperator&&) noexcept = default;
StftOperator& StftOperator::operator=(StftOperator&&) noexcept = default;

const SignalGeometry& StftOperator::signal_geometry() const { return impl_->sig; }
const TFGrid& StftOperator::grid() const { return impl_->grid; }

void StftOperator::apply(std::span<const Complex> f, std::span<Complex> out) const {
  const auto& d = *impl_;
  const std::size_t n = d.sig.n;
  const std::size_t nw = d.grid.nw;
  if (f.size() != n || out.size() != d.grid.size()) throw InvalidArgument("stft: buffer size mismatch");

  std::vector<Complex> buf(n);
  for (std::size_t i = 0; i < d.grid.nx; ++i) {
    std::fill(buf.begin(), buf.end(), Complex{});
    const double* w = d.win.data() + d.win_offset[i];
    const std::size_t k0 = d.k_lo[i];
    for (std::size_t q = 0; q < d.k_len[i]; ++q) {
      buf[k0 + q] = f[k0 + q] * w[q] * d.pre[k0 + q];
    }
    d.fwd.execute(buf);
    Complex* row = out.data() + i * nw;
    for (std::size_t j = 0; j < nw; ++j) {
      row[j] = d.sig.dt * d.post[j] * buf[d.bin[j]];
    }
  }
}

void StftOperator::apply_adjoint(std::span<const Complex> v, std::span<Complex> out) const {
  const auto& d = *impl_;
  const std::size_t n = d.sig.n;
  const std::size_t nw = d.grid.nw;
  if (v.size() != d.grid.size() || out.size() != n) throw InvalidArgument("stft adjoint: buffer size mismatch");

  const double area = d.grid.cell_area();
  std::fill(out.begin(), out.end(), Complex{});
  std::vector<Complex> buf(n);
  for (std::size_t i = 0; i < d.grid.nx; ++i) {
    std::fill(buf.begin(), buf.end(), Complex{});
    const Complex* row = v.data() + i * nw;
    for (std::size_t j = 0; j < nw; ++j) {
      buf[d.bin[j]] += row[j] * std::conj(d.post[j]);
    }
    d.bwd.execute(buf);
    const double* w = d.win.data() + d.win_offset[i];
    const std::size_t k0 = d.k_lo[i];
    for (std::size_t q = 0; q < d.k_len[i]; ++q) {
      out[k0 + q] += area * w[q] * std::conj(d.pre[k0 + q]) * buf[k0 + q];
    }
  }
}

TFRepr StftOperator::forward(const Signal& f) const {
  if (f.geometry() != impl_->sig) {
    // Geometry must match bit for bit; the operator tables were built for it.
    throw GeometryError("stft: signal geometry does not match the operator");
  }
  std::vector<Complex> out(impl_->grid.size());
  apply(f.samples(), out);
  return TFRepr(impl_->grid, std::move(out));
}

Signal StftOperator::adjoint(const TFRepr& v) const {
  if (!(v.grid() == impl_->grid)) throw GeometryError("stft adjoint: grid does not match the operator");
  std::vector<Complex> out(impl_->sig.n);
  apply_adjoint(v.values(), out);
  return Signal(std::move(out), impl_->sig);
}

TFRepr stft(const Signal& f, const TFGrid& grid) { return StftOperator(f.geometry(), grid).forward(f); }

Signal stft_adjoint(const TFRepr& v, const SignalGeometry& geometry) {
  return StftOperator(geometry, v.grid()).adjoint(v);
}

}  // namespace psieve
