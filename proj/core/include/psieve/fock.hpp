#pragma once

#include <cstddef>
#include <vector>

#include "psieve/types.hpp"

namespace psieve {

/// Weighted Bargmann samples from STFT samples:
///
///   F~(x + i w) = exp(-i pi x w) V(x, -w) = Bf(z) exp(-pi |z|^2 / 2).
///
/// The grid must be symmetric in w so the frequency flip maps grid to grid.
FockRepr bargmann_from_stft(const TFRepr& v);

/// Inverse of bargmann_from_stft.
TFRepr stft_from_bargmann(const FockRepr& f);

/// True when w is a lattice vector of the grid (within 1e-9 cells).
bool is_lattice_shift(const TFGrid& grid, Complex w);

/// Fock translation T_w F(z) = exp(pi conj(w) z - pi |w|^2 / 2) F(z - w) on weighted samples,
/// which becomes exp(i pi Im(conj(w) z)) F~(z - w).
///
/// Lattice shifts are exact; other shifts interpolate F~ bilinearly and are approximate.
/// Throws GeometryError if more than `max_lost_fraction` of the L1 mass leaves the grid.
FockRepr translate_fock(const FockRepr& f, Complex w, double max_lost_fraction = 1e-3);

/// Indicator kernel of the disc of radius 1/R centered at the origin.
struct DiscKernel {
  double R = 1.0;
  double radius() const { return 1.0 / R; }
};

/// 1 - exp(-pi / R^2), the mass of exp(-pi |u|^2) on the disc of radius 1/R.
double disc_gaussian_mass(double R);

/// Area of [x1,x2] x [y1,y2] intersected with the disc of radius r at the origin.
double rect_disc_area(double x1, double x2, double y1, double y2, double r);

/// Twisted (Fock) convolution F * chi_{D_{1/R}} as weighted samples
///
///   (F*G)~(z) = sum_w F~(w) chi(z - w) exp(-pi |z - w|^2 / 2) exp(i pi Im(z conj(w))) dA_w,
///
/// where boundary cells of the disc are weighted by their exact covered area fraction.
/// Output points whose disc leaves the grid use only the in-grid part.
/// Throws GeometryError when the disc diameter exceeds the grid extent.
FockRepr fock_convolve(const FockRepr& f, const DiscKernel& kernel);

/// Grid point (time index, frequency index).
struct GridPoint {
  std::size_t i = 0;
  std::size_t j = 0;
};

/// Same quantity as fock_convolve, evaluated only at the given points.
std::vector<Complex> fock_convolve_at(const FockRepr& f, const DiscKernel& kernel,
                                      const std::vector<GridPoint>& points);

struct ReproducingReport {
  double max_residual = 0.0;           ///< max over probes, relative to max |F~| on the grid
  std::vector<double> residuals;       ///< per probe, same scale
};

/// Residual of F(z) = (1 - exp(-pi/R^2))^-1 (F * chi_{D_{1/R}})(z) at the probes.
/// Throws GeometryError for probes whose disc is not fully inside the grid.
ReproducingReport local_reproducing_check(const FockRepr& f, double R, const std::vector<GridPoint>& probes);

/// Grid points with |z| <= radius, every `stride`-th index in each direction.
std::vector<GridPoint> probes_within(const TFGrid& grid, double radius, std::size_t stride = 1);

}  // namespace psieve
