#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

#include "psieve/types.hpp"

namespace psieve {

/// The window is truncated to |t| < kWindowCutoff, where |phi(t)| < 1e-40.
inline constexpr double kWindowCutoff = 6.0;

/// Normalized Gaussian phi(t) = 2^(1/4) exp(-pi t^2).
inline double gaussian(double t) {
  return std::pow(2.0, 0.25) * std::exp(-std::numbers::pi * t * t);
}

/// n samples of phi(t - center); sample n/2 sits exactly on the center.
/// Throws InvalidArgument when n*dt < 2*kWindowCutoff.
Signal gaussian_window(std::size_t n, double dt, double center);

/// Discrete Gaussian-window STFT
///
///   V[i][j] = dt * sum_k f_k phi(t_k - x_i) exp(-2 pi i w_j t_k)
///
/// as an explicit linear map C^n -> C^(nx*nw). Each time row is one windowed DFT
/// of length n, so the frequency step must be a multiple of 1/(n*dt).
///
/// The adjoint is taken with respect to <f,g>*dt on signals and <U,V>*dA on the
/// plane, so <forward(f), V>*dA == <f, adjoint(V)>*dt up to rounding.
///
/// Rows are processed in increasing i and the adjoint accumulates rows in the same
/// order, which makes both directions bitwise deterministic.
class StftOperator {
 public:
  StftOperator(const SignalGeometry& signal, const TFGrid& grid);
  ~StftOperator();
  StftOperator(StftOperator&&) noexcept;
  StftOperator& operator=(StftOperator&&) noexcept;

  const SignalGeometry& signal_geometry() const;
  const TFGrid& grid() const;

  TFRepr forward(const Signal& f) const;
  Signal adjoint(const TFRepr& v) const;

  void apply(std::span<const Complex> f, std::span<Complex> out) const;
  void apply_adjoint(std::span<const Complex> v, std::span<Complex> out) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

TFRepr stft(const Signal& f, const TFGrid& grid);
Signal stft_adjoint(const TFRepr& v, const SignalGeometry& geometry);

/// Riemann-sum norms: sum |v| dA, (sum |v|^2 dA)^(1/2), max |v|.
template <class Tag>
double tf_norm(const PlaneField<Tag>& v, Norm p) {
  double acc = 0.0;
  switch (p) {
    case Norm::L1:
      for (const auto& c : v.values()) acc += std::abs(c);
      return acc * v.grid().cell_area();
    case Norm::L2:
      for (const auto& c : v.values()) acc += std::norm(c);
      return std::sqrt(acc * v.grid().cell_area());
    case Norm::Linf:
      for (const auto& c : v.values()) acc = std::max(acc, std::abs(c));
      return acc;
  }
  return acc;
}

}  // namespace psieve
