#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "psieve/types.hpp"

namespace psieve {

/// How the disc D_{1/R} is rasterized onto grid cells.
enum class RasterMode {
  CenterIn,  ///< cell counted iff its center lies in the closed disc
  Outer,     ///< cell counted iff the cell rectangle meets the closed disc
};

/// Boolean footprint of D_{1/R} on lattice offsets (p, q), |p| <= half_x, |q| <= half_w,
/// with the disc centered at fractional cell offset (center_x, center_w).
/// Every row of a disc stencil is a contiguous run of columns.
struct DiscStencil {
  std::ptrdiff_t half_x = 0;
  std::ptrdiff_t half_w = 0;
  double cell_area = 0.0;
  std::vector<std::uint8_t> cells;   ///< (2 half_x + 1) x (2 half_w + 1), row p major
  std::vector<std::ptrdiff_t> q_lo;  ///< per row; q_lo > q_hi marks an empty row
  std::vector<std::ptrdiff_t> q_hi;

  bool at(std::ptrdiff_t p, std::ptrdiff_t q) const {
    return cells[static_cast<std::size_t>((p + half_x) * (2 * half_w + 1) + (q + half_w))] != 0;
  }
  std::size_t count() const;
  double area() const { return static_cast<double>(count()) * cell_area; }
};

/// Throws GeometryError when 1/R is smaller than one cell step.
DiscStencil disc_raster(double R, const TFGrid& grid, RasterMode mode, double center_x = 0.0,
                        double center_w = 0.0);

struct DensityOptions {
  RasterMode mode = RasterMode::CenterIn;
  /// Disc centers are placed on a lattice refined by this factor in each direction
  /// (1 = cell centers only, 2 = also cell edges and corners).
  int center_subdivision = 1;
};

struct DensityReport {
  double R = 0.0;
  double rho = 0.0;      ///< planar maximum Nyquist density
  double measure = 0.0;  ///< |Delta|
  double bound = 0.0;    ///< rho / (1 - exp(-pi / R^2))
  /// Maximizing disc center in (fractional) cell index units; may lie in the padding.
  double center_i = 0.0;
  double center_j = 0.0;
  double center_x = 0.0;
  double center_w = 0.0;
  std::size_t count = 0;  ///< cells under the maximizing disc
};

/// rho(Delta, R) = sup_z |Delta cap (z + D_{1/R})|, taken over disc centers at the cell centers
/// of the grid padded by the disc radius (Delta extended by false). Ties resolve to the
/// lexicographically smallest (time, frequency) center.
DensityReport nyquist_density(const Mask& mask, double R, const DensityOptions& options = {});

/// Lambda(mu, D_{1/R}) = sup_w int_{w + D} exp(pi |z|^2 / 2) dmu(z) for the mask measure
/// dmu = scale * chi_Delta exp(-pi |z|^2 / 2) dz, evaluated cell by cell.
double lambda_weight(const Mask& mask, double R, double scale = 1.0, RasterMode mode = RasterMode::CenterIn);

/// rho / (1 - exp(-pi / R^2)).
double sieve_bound(double rho, double R);

/// 33 logarithmically spaced radii parameters in [0.25, 4].
std::vector<double> default_R_grid();

/// True when the disc of radius 1/R spans at least one cell.
bool admissible_R(const TFGrid& grid, double R);

struct OptimizeResult {
  double R = 0.0;
  double bound = 0.0;
  double rho = 0.0;
};

/// Minimizes the sieve bound over the admissible entries of R_grid (ties go to the smallest R).
OptimizeResult optimize_R(const Mask& mask, const std::vector<double>& R_grid, RasterMode mode = RasterMode::CenterIn);

/// P_Delta V.
TFRepr restrict_to(const TFRepr& v, const Mask& mask);

/// ||P_Delta V||_1 without materializing P_Delta V.
double masked_l1(const TFRepr& v, const Mask& mask);

/// max over signals of ||P_Delta V f||_1 / ||V f||_1, a lower bound for delta(Delta).
double empirical_delta(const Mask& mask, const std::vector<Signal>& testset);

struct Theorem1Report {
  double lhs = 0.0;  ///< ||P_Delta V f||_1
  double rhs = 0.0;  ///< sieve_bound(rho_outer, R) ||V f||_1
  double ratio = 0.0;
  double rho = 0.0;
  bool pass = false;
};

/// Direct check of ||P_Delta V f||_1 <= rho(Delta,R) / (1 - exp(-pi/R^2)) ||V f||_1 on the mask grid.
/// rho uses the outer rasterization; pass iff lhs <= rhs (1 + slack).
Theorem1Report verify_theorem1(const Signal& f, const Mask& mask, double R, double slack = 0.05);

/// Same check from a precomputed STFT and density.
Theorem1Report verify_theorem1(const TFRepr& v, const Mask& mask, double rho_outer, double R, double slack = 0.05);

struct UncertaintyReport {
  double epsilon = 0.0;    ///< 1 - ||P_Delta V f||_1 / ||V f||_1
  double inf_bound = 0.0;  ///< min over R_grid of the sieve bound
  double best_R = 0.0;
  double measure = 0.0;
  bool pass = false;
};

/// Checks 1 - eps <= inf_R rho(Delta,R)/(1 - exp(-pi/R^2)) <= |Delta| with relative slack.
UncertaintyReport uncertainty_check(const Signal& f, const Mask& mask, const std::vector<double>& R_grid,
                                    double slack = 0.05);

UncertaintyReport uncertainty_check(const TFRepr& v, const Mask& mask, const OptimizeResult& best,
                                    double slack = 0.05);

}  // namespace psieve
