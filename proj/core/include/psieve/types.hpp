#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace psieve {

using Complex = std::complex<double>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent or degenerate sampling geometry (signal vs. grid, disc vs. grid).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// An argument violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Sampling geometry of a finite time series: t_k = t0 + k*dt, k = 0..n-1.
struct SignalGeometry {
  std::size_t n = 0;
  double dt = 0.0;
  double t0 = 0.0;

  double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
  double t_last() const { return time(n - 1); }
  void validate() const;

  bool operator==(const SignalGeometry&) const = default;
};

/// Finite complex time series, a truncated element of M^1.
class Signal {
 public:
  Signal(std::vector<Complex> samples, double dt, double t0);
  Signal(std::vector<Complex> samples, const SignalGeometry& geometry);

  static Signal zeros(const SignalGeometry& geometry);

  const std::vector<Complex>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  double dt() const { return dt_; }
  double t0() const { return t0_; }
  double time(std::size_t k) const { return t0_ + static_cast<double>(k) * dt_; }
  SignalGeometry geometry() const { return {samples_.size(), dt_, t0_}; }

  /// (sum |f_k|^p dt)^(1/p) for p = 1, 2.
  double norm1() const;
  double norm2() const;

 private:
  std::vector<Complex> samples_;
  double dt_;
  double t0_;
};

/// Rectangular lattice on the time-frequency plane: x_i = x0 + i*dx, w_j = w0 + j*dw.
struct TFGrid {
  std::size_t nx = 0;
  std::size_t nw = 0;
  double dx = 0.0;
  double dw = 0.0;
  double x0 = 0.0;
  double w0 = 0.0;

  double x(std::size_t i) const { return x0 + static_cast<double>(i) * dx; }
  double w(std::size_t j) const { return w0 + static_cast<double>(j) * dw; }
  double cell_area() const { return dx * dw; }
  std::size_t size() const { return nx * nw; }
  std::size_t index(std::size_t i, std::size_t j) const { return i * nw + j; }
  double x_last() const { return x(nx - 1); }
  double w_last() const { return w(nw - 1); }

  /// True when w -> -w maps the frequency axis onto itself.
  bool frequency_symmetric(double tol = 1e-9) const;
  void validate() const;

  /// Symmetric grid covering [-extent, extent]^2 with the given step.
  static TFGrid symmetric(double extent, double step);

  bool operator==(const TFGrid&) const = default;
};

namespace detail {
struct StftTag {};
struct FockTag {};
}  // namespace detail

/// Complex field sampled on a TFGrid, stored time-major (row i = x_i).
template <class Tag>
class PlaneField {
 public:
  PlaneField(TFGrid grid, std::vector<Complex> values) : grid_(grid), values_(std::move(values)) {
    grid_.validate();
    if (values_.size() != grid_.size()) {
      throw InvalidArgument("plane field: value count does not match grid size");
    }
    for (const auto& v : values_) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw InvalidArgument("plane field: non-finite value");
      }
    }
  }
  explicit PlaneField(TFGrid grid) : PlaneField(grid, std::vector<Complex>(grid.size())) {}

  const TFGrid& grid() const { return grid_; }
  const std::vector<Complex>& values() const { return values_; }
  const Complex& at(std::size_t i, std::size_t j) const { return values_[grid_.index(i, j)]; }

 private:
  TFGrid grid_;
  std::vector<Complex> values_;
};

/// Samples of the STFT V_phi f on a grid.
using TFRepr = PlaneField<detail::StftTag>;

/// Weighted Bargmann samples F(z) exp(-pi |z|^2 / 2), z = x + i w.
using FockRepr = PlaneField<detail::FockTag>;

/// Rasterized measurable set on a TFGrid (cell (i,j) in the set iff cells[index] != 0).
class Mask {
 public:
  Mask(TFGrid grid, std::vector<std::uint8_t> cells);
  explicit Mask(TFGrid grid);

  static Mask full(const TFGrid& grid);

  const TFGrid& grid() const { return grid_; }
  const std::vector<std::uint8_t>& cells() const { return cells_; }
  bool at(std::size_t i, std::size_t j) const { return cells_[grid_.index(i, j)] != 0; }

  std::size_t count() const;
  double measure() const { return static_cast<double>(count()) * grid_.cell_area(); }
  Mask complement() const;

  bool operator==(const Mask& other) const { return grid_ == other.grid_ && cells_ == other.cells_; }

 private:
  TFGrid grid_;
  std::vector<std::uint8_t> cells_;
};

enum class Norm { L1, L2, Linf };

}  // namespace psieve
