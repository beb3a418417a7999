#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "psieve/types.hpp"

namespace psieve {

/// Seeded generator whose derived draws are identical on every platform
/// (the standard distributions are implementation-defined, the engine is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(engine_() % span);
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal by Box-Muller.
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Circular complex normal with E|z|^2 = 1.
  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return Complex(re, im) * std::sqrt(0.5);
  }

  Complex unit_phase() { return std::polar(1.0, 2.0 * std::numbers::pi * uniform()); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace psieve
