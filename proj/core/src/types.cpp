#include "psieve/types.hpp"

#include <algorithm>
#include <cmath>

namespace psieve {

void SignalGeometry::validate() const {
  if (n == 0) throw InvalidArgument("signal geometry: n must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("signal geometry: dt must be positive");
  if (!std::isfinite(t0)) throw InvalidArgument("signal geometry: t0 must be finite");
}

Signal::Signal(std::vector<Complex> samples, double dt, double t0)
    : samples_(std::move(samples)), dt_(dt), t0_(t0) {
  if (samples_.empty()) throw InvalidArgument("signal: no samples");
  geometry().validate();
  for (const auto& s : samples_) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
      throw InvalidArgument("signal: non-finite sample");
    }
  }
}

Signal::Signal(std::vector<Complex> samples, const SignalGeometry& geometry)
    : Signal(std::move(samples), geometry.dt, geometry.t0) {
  if (samples_.size() != geometry.n) throw InvalidArgument("signal: sample count does not match geometry");
}

Signal Signal::zeros(const SignalGeometry& geometry) {
  geometry.validate();
  return Signal(std::vector<Complex>(geometry.n), geometry.dt, geometry.t0);
}

double Signal::norm1() const {
  double s = 0.0;
  for (const auto& v : samples_) s += std::abs(v);
  return s * dt_;
}

double Signal::norm2() const {
  double s = 0.0;
  for (const auto& v : samples_) s += std::norm(v);
  return std::sqrt(s * dt_);
}

bool TFGrid::frequency_symmetric(double tol) const {
  return std::abs(w0 + w_last()) <= tol * std::max(1.0, std::abs(w0));
}

void TFGrid::validate() const {
  if (nx == 0 || nw == 0) throw InvalidArgument("grid: empty grid");
  if (!(dx > 0.0) || !(dw > 0.0) || !std::isfinite(dx) || !std::isfinite(dw)) {
    throw InvalidArgument("grid: steps must be positive");
  }
  if (!std::isfinite(x0) || !std::isfinite(w0)) throw InvalidArgument("grid: origin must be finite");
}

TFGrid TFGrid::symmetric(double extent, double step) {
  if (!(extent > 0.0) || !(step > 0.0)) throw InvalidArgument("grid: extent and step must be positive");
  const double cells = extent / step;
  const auto half = static_cast<std::size_t>(std::llround(cells));
  if (std::abs(cells - static_cast<double>(half)) > 1e-9 * cells) {
    throw InvalidArgument("grid: extent must be a multiple of the step");
  }
  TFGrid g{2 * half + 1, 2 * half + 1, step, step, -extent, -extent};
  g.validate();
  return g;
}

Mask::Mask(TFGrid grid, std::vector<std::uint8_t> cells) : grid_(grid), cells_(std::move(cells)) {
  grid_.validate();
  if (cells_.size() != grid_.size()) throw InvalidArgument("mask: cell count does not match grid size");
  for (auto& c : cells_) c = c != 0 ? 1 : 0;
}

Mask::Mask(TFGrid grid) : Mask(grid, std::vector<std::uint8_t>(grid.size(), 0)) {}

Mask Mask::full(const TFGrid& grid) { return Mask(grid, std::vector<std::uint8_t>(grid.size(), 1)); }

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

Mask Mask::complement() const {
  std::vector<std::uint8_t> c(cells_.size());
  std::transform(cells_.begin(), cells_.end(), c.begin(), [](std::uint8_t v) { return std::uint8_t(1 - v); });
  return Mask(grid_, std::move(c));
}

}  // namespace psieve
