#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "psieve/random.hpp"
#include "psieve/stft.hpp"
#include "psieve/types.hpp"

namespace psieve::test {

// Default recovery geometry: 256 samples on [-8, 8), grid 1/16 over [-8, 8]^2.
inline SignalGeometry default_signal() { return {256, 1.0 / 16.0, -8.0}; }
inline TFGrid default_grid() { return TFGrid::symmetric(8.0, 1.0 / 16.0); }

// Fine geometry for the Bargmann layer: grid 1/32 over [-6, 6]^2.
inline SignalGeometry fine_signal() { return {1024, 1.0 / 32.0, -16.0}; }
inline TFGrid fine_grid() { return TFGrid::symmetric(6.0, 1.0 / 32.0); }

// Toy geometry small enough for dense oracles: 16 samples, 16 x 16 grid.
inline SignalGeometry toy_signal() { return {16, 0.25, -2.0}; }
inline TFGrid toy_grid() { return TFGrid{16, 16, 0.25, 0.25, -2.0, -2.0}; }

inline Complex atom(double t, double x, double w) {
  return std::pow(2.0, 0.25) * std::exp(-std::numbers::pi * (t - x) * (t - x)) *
         std::polar(1.0, 2.0 * std::numbers::pi * w * t);
}

// Sum of `count` random Gaussian atoms with shifts in [-box, box].
inline Signal random_atoms(const SignalGeometry& g, Rng& rng, int count, double box) {
  std::vector<Complex> s(g.n);
  for (int a = 0; a < count; ++a) {
    const Complex c = rng.complex_normal();
    const double x = rng.uniform(-box, box);
    const double w = rng.uniform(-box, box);
    for (std::size_t k = 0; k < g.n; ++k) s[k] += c * atom(g.time(k), x, w);
  }
  return Signal(std::move(s), g);
}

inline Signal random_samples(const SignalGeometry& g, Rng& rng) {
  std::vector<Complex> s(g.n);
  for (auto& v : s) v = rng.complex_normal();
  return Signal(std::move(s), g);
}

inline TFRepr random_field(const TFGrid& g, Rng& rng) {
  std::vector<Complex> v(g.size());
  for (auto& c : v) c = rng.complex_normal();
  return TFRepr(g, std::move(v));
}

inline Mask random_mask(const TFGrid& g, Rng& rng, double p) {
  std::vector<std::uint8_t> cells(g.size());
  for (auto& c : cells) c = rng.bernoulli(p) ? 1 : 0;
  return Mask(g, std::move(cells));
}

// Cells whose centers lie in the closed disc of radius r around (cx, cw).
inline Mask disc_mask(const TFGrid& g, double cx, double cw, double r) {
  std::vector<std::uint8_t> cells(g.size(), 0);
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.nw; ++j) {
      const double ux = g.x(i) - cx;
      const double uw = g.w(j) - cw;
      cells[g.index(i, j)] = ux * ux + uw * uw <= r * r ? 1 : 0;
    }
  }
  return Mask(g, std::move(cells));
}

inline double inner_re(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (std::conj(a[k]) * b[k]).real();
  return s;
}

inline Complex inner(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  Complex s{};
  for (std::size_t k = 0; k < a.size(); ++k) s += std::conj(a[k]) * b[k];
  return s;
}

}  // namespace psieve::test
