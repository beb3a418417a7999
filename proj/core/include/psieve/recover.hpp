#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "psieve/types.hpp"

namespace psieve {

struct SolverParams {
  int max_iters = 20000;
  double gap_tol = 1e-6;     ///< relative primal-dual gap (gap / ||W G||_1)
  double step_ratio = 0.95;  ///< tau * sigma * L^2
  int op_norm_iters = 100;
  std::uint64_t seed = 0;
  int gap_every = 20;        ///< iterations between duality-gap evaluations
  int cg_iters = 60;         ///< cap on CG steps when building a dual-feasible point
  double cg_tol = 1e-13;
  /// Iterations between primal-weight updates; 0 keeps tau = sigma throughout.
  int restart_every = 100;

  void validate() const;
};

enum class SolverStatus { Converged, MaxIters };

std::string to_string(SolverStatus s);

struct RecoveryResult {
  Signal recovered;
  std::vector<double> objective_trace;  ///< primal objective after every iteration
  std::vector<double> gap_trace;        ///< relative gap every gap_every iterations
  int iterations = 0;
  SolverStatus status = SolverStatus::MaxIters;
  double residual_l1 = 0.0;             ///< ||W (G - V recovered)||_1
  double op_norm = 0.0;
};

/// Spectral norm of the discrete STFT as a map (C^n, dt) -> (C^(nx*nw), dA), estimated by
/// power iteration on V*V from a seeded random start. The returned value is the square root
/// of the largest Rayleigh quotient seen, so it never decreases with more iterations.
double op_norm_power(const SignalGeometry& geometry, const TFGrid& grid, int iters, std::uint64_t seed = 0);

/// min_g ||G - V g||_1 by a Chambolle-Pock primal-dual iteration. Steps start at
/// tau = sigma = sqrt(step_ratio)/L; every restart_every iterations the ratio tau/sigma is
/// rebalanced from the primal and dual movement while tau*sigma*L^2 stays at step_ratio.
RecoveryResult denoise_l1(const TFRepr& observed, const SignalGeometry& geometry, const SolverParams& params = {});

/// min_h ||P_{Delta^c}(H - V h)||_1; values of H on Delta are ignored.
/// Throws InvalidArgument when Delta covers the whole grid.
RecoveryResult inpaint_l1(const TFRepr& observed, const Mask& missing, const SignalGeometry& geometry,
                          const SolverParams& params = {});

/// 2 eps (1 - e^{-pi/R^2}) / (1 - e^{-pi/R^2} - rho), or nullopt when rho >= 1 - e^{-pi/R^2}.
std::optional<double> missing_data_bound(double epsilon, double rho, double R);

/// Threshold 1/2 (1 - e^{-pi/R^2}) below which sparse noise is removed exactly.
double denoise_threshold(double R);

/// Threshold 1 - e^{-pi/R^2} for the missing-data bound.
double inpaint_threshold(double R);

}  // namespace psieve
