#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "psieve/density.hpp"
#include "psieve/types.hpp"

// Brute-force references for the fast paths. Nothing in here calls the FFT
// operator, the density scan or the primal-dual solver.
namespace psieve::oracle {

/// The discrete STFT materialized entry by entry: entries[(i*nw + j) * n + k] =
/// dt * phi(t_k - x_i) * exp(-2 pi i w_j t_k), without window truncation.
struct DenseOperator {
  std::size_t rows = 0;  ///< nx * nw
  std::size_t cols = 0;  ///< n
  double dt = 0.0;
  double dA = 0.0;
  std::vector<Complex> entries;

  const Complex& at(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }
  std::vector<Complex> apply(const std::vector<Complex>& f) const;
  /// Adjoint for <.,.>*dt on signals and <.,.>*dA on the plane.
  std::vector<Complex> apply_adjoint(const std::vector<Complex>& v) const;
};

/// Refuses operators with more than max_entries entries.
DenseOperator dense_stft_operator(const SignalGeometry& geometry, const TFGrid& grid,
                                  std::size_t max_entries = std::size_t{1} << 24);

/// Singular values (descending) of the dense operator in the weighted norms.
std::vector<double> weighted_singular_values(const DenseOperator& op);

/// Continuous-time test function f(t) with a bounded effective support.
struct ContinuousSignal {
  std::function<Complex(double)> f;
  double t_min = 0.0;
  double t_max = 0.0;
};

/// Adaptive Gauss-Kronrod evaluation of V_phi f(x, w) = int f(t) phi(t - x) e^{-2 pi i w t} dt.
/// Throws Error when the requested absolute accuracy is not reached.
std::vector<Complex> quadrature_stft(const ContinuousSignal& f, const std::vector<std::pair<double, double>>& points,
                                     double abs_tol = 1e-10);

/// rho(Delta, R) by looping over every disc center and every grid cell.
/// Refuses grids larger than 128 x 128.
double dense_density_oracle(const Mask& mask, double R, RasterMode mode = RasterMode::CenterIn,
                            int center_subdivision = 1);

struct LpResult {
  double optimum = 0.0;            ///< value of the polygonal LP
  std::vector<Complex> minimizer;  ///< signal samples
  int pivots = 0;
  /// True objective sum_c w_c |G_c - (V g)_c| dA at the LP minimizer.
  double modulus_objective = 0.0;
};

/// Number of facets of the polygon replacing the complex modulus.
inline constexpr int kLpFacets = 64;

/// sec(pi / kLpFacets) - 1: relative gap between the polygonal and the true modulus.
double lp_facet_band();

/// min_g sum_{c kept} |G_c - (V g)_c| dA with |.| replaced by the circumscribed
/// 64-gon gauge (so optimum <= true optimum <= optimum * sec(pi/64)), solved as the
/// dual LP by a dense two-phase simplex. Refuses instances with more than 200 primal
/// variables (2n real signal coordinates plus one epigraph variable per kept cell).
LpResult lp_l1_oracle(const DenseOperator& op, const TFRepr& data, const std::optional<Mask>& missing = std::nullopt);

struct NuReport {
  double constant = 0.0;           ///< 1 - exp(-pi / R^2)
  std::vector<double> ratios;      ///< ||Phi * G_R||_1 / ||Phi||_1 per element
  double max_abs_deviation = 0.0;
  double max_rel_deviation = 0.0;
};

/// Measures ||Phi * chi_{D_{1/R}}||_1 / ||Phi||_1 on numerical Bargmann transforms.
NuReport nu_check(double R, const std::vector<FockRepr>& testset);

}  // namespace psieve::oracle
