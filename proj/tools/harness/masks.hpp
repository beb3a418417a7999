#pragma once

#include "config.hpp"
#include "psieve/random.hpp"

namespace psieve::harness {

struct GeneratedMask {
  Mask mask;
  int attempts = 1;
  /// rho_outer at the constraint radius, when the spec carries max_rho.
  std::optional<double> constrained_rho;
};

/// Draws a mask from the spec. When max_rho is set, redraws until
/// rho_outer(Delta, R) <= max_rho; throws Error after max_attempts draws.
GeneratedMask generate_mask(const MaskSpec& spec, const TFGrid& grid, double R, Rng& rng);

}  // namespace psieve::harness
