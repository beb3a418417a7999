#include <gtest/gtest.h>

#include "psieve/fock.hpp"
#include "psieve/stft.hpp"
#include "support.hpp"

using namespace psieve;

namespace {

FockRepr window_bargmann(const SignalGeometry& sg, const TFGrid& g) {
  return bargmann_from_stft(stft(gaussian_window(sg.n, sg.dt, 0.0), g));
}

}  // namespace

TEST(Bargmann, ModulusIsTheFlippedStftModulus) {
  Rng rng(41);
  const auto sg = test::default_signal();
  const auto g = test::default_grid();
  const auto v = stft(test::random_atoms(sg, rng, 3, 4.0), g);
  const auto f = bargmann_from_stft(v);
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.nw; ++j) {
      EXPECT_NEAR(std::abs(f.at(i, j)), std::abs(v.at(i, g.nw - 1 - j)), 1e-15 * (1.0 + std::abs(f.at(i, j))));
    }
  }
  const auto back = stft_from_bargmann(f);
  for (std::size_t c = 0; c < g.size(); ++c) EXPECT_LT(std::abs(back.values()[c] - v.values()[c]), 1e-14);
}

TEST(Bargmann, WindowMapsToPositiveGaussian) {
  const auto sg = test::default_signal();
  const auto g = test::default_grid();
  const auto f = window_bargmann(sg, g);
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.nw; ++j) {
      const double x = g.x(i), w = g.w(j);
      if (x * x + w * w > 9.0) continue;
      EXPECT_GT(f.at(i, j).real(), 0.0);
      EXPECT_LT(std::abs(std::arg(f.at(i, j))), 1e-8);
      EXPECT_NEAR(std::abs(f.at(i, j)), std::exp(-std::numbers::pi * (x * x + w * w) / 2.0), 1e-6);
    }
  }
}

TEST(Bargmann, ZeroMapsToZeroAndAsymmetricGridIsRejected) {
  const auto f = bargmann_from_stft(TFRepr(test::default_grid()));
  for (const auto& c : f.values()) EXPECT_EQ(c, Complex{});
  EXPECT_THROW(bargmann_from_stft(TFRepr(TFGrid{4, 4, 0.5, 0.5, 0.0, 0.0})), GeometryError);
}

TEST(TranslateFock, ZeroShiftIsIdentity) {
  Rng rng(43);
  const auto sg = test::default_signal();
  const auto g = test::default_grid();
  const auto f = bargmann_from_stft(stft(test::random_atoms(sg, rng, 2, 3.0), g));
  const auto t = translate_fock(f, Complex{});
  EXPECT_EQ(t.values(), f.values());
}

TEST(TranslateFock, LatticeShiftMovesModulusAndPreservesNorm) {
  Rng rng(47);
  const auto sg = test::default_signal();
  const auto g = test::default_grid();
  const auto f = bargmann_from_stft(stft(test::random_atoms(sg, rng, 2, 2.0), g));
  const Complex w(1.0, -0.5);
  ASSERT_TRUE(is_lattice_shift(g, w));
  const auto t = translate_fock(f, w);
  const std::size_t si = 16, sj = 8;
  for (std::size_t i = si; i < g.nx; ++i) {
    for (std::size_t j = 0; j + sj < g.nw; ++j) {
      EXPECT_DOUBLE_EQ(std::abs(t.at(i, j)), std::abs(f.at(i - si, j + sj)));
    }
  }
  for (auto p : {Norm::L1, Norm::L2}) EXPECT_NEAR(tf_norm(t, p), tf_norm(f, p), 1e-12 * tf_norm(f, p));
}

TEST(TranslateFock, RejectsShiftsThatLeaveTheGrid) {
  const auto g = test::default_grid();
  const auto f = window_bargmann(test::default_signal(), g);
  EXPECT_THROW(translate_fock(f, Complex(9.0, 0.0)), GeometryError);
}

TEST(TranslateFock, OffLatticeShiftApproximatesTheTranslate) {
  const auto sg = test::default_signal();
  const auto g = test::default_grid();
  const auto f = window_bargmann(sg, g);
  const Complex w(0.53, 0.21);
  ASSERT_FALSE(is_lattice_shift(g, w));
  const auto t = translate_fock(f, w);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.nw; ++j) {
      const double ux = g.x(i) - w.real(), uw = g.w(j) - w.imag();
      worst = std::max(worst, std::abs(std::abs(t.at(i, j)) - std::exp(-std::numbers::pi * (ux * ux + uw * uw) / 2.0)));
    }
  }
  EXPECT_LT(worst, 1e-2);
}

TEST(RectDiscArea, MatchesKnownAreas) {
  EXPECT_NEAR(rect_disc_area(-2, 2, -2, 2, 1.0), std::numbers::pi, 1e-12);
  EXPECT_NEAR(rect_disc_area(0, 2, 0, 2, 1.0), std::numbers::pi / 4.0, 1e-12);
  EXPECT_NEAR(rect_disc_area(-0.1, 0.1, -0.1, 0.1, 1.0), 0.04, 1e-15);
  EXPECT_EQ(rect_disc_area(2, 3, 2, 3, 1.0), 0.0);
  EXPECT_NEAR(disc_gaussian_mass(1.0), 1.0 - std::exp(-std::numbers::pi), 1e-15);
}

TEST(FockConvolve, WindowIsReproducedUpToTheDiscMass) {
  const auto sg = test::fine_signal();
  const auto g = test::fine_grid();
  const auto f = window_bargmann(sg, g);
  const auto probes = probes_within(g, 2.0, 4);
  ASSERT_GT(probes.size(), 100u);
  const auto conv = fock_convolve_at(f, DiscKernel{1.0}, probes);
  const double c = 1.0 - std::exp(-std::numbers::pi);
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const Complex expected = c * f.at(probes[k].i, probes[k].j);
    EXPECT_LE(std::abs(conv[k] - expected), 2e-3 * std::abs(expected));
  }
}

TEST(FockConvolve, FullConvolutionAgreesWithPointEvaluationAndIsLinear) {
  Rng rng(53);
  const TFGrid g = TFGrid::symmetric(4.0, 1.0 / 8.0);
  const SignalGeometry sg{128, 1.0 / 8.0, -8.0};
  const auto a = bargmann_from_stft(stft(test::random_atoms(sg, rng, 2, 1.5), g));
  const auto b = bargmann_from_stft(stft(test::random_atoms(sg, rng, 2, 1.5), g));
  const DiscKernel k{1.0};
  const Complex ca(0.7, 0.2), cb(-1.3, 0.4);
  std::vector<Complex> mix(g.size());
  for (std::size_t c = 0; c < g.size(); ++c) mix[c] = ca * a.values()[c] + cb * b.values()[c];
  const auto lhs = fock_convolve(FockRepr(g, mix), k);
  const auto fa = fock_convolve(a, k);
  const auto fb = fock_convolve(b, k);
  for (std::size_t c = 0; c < g.size(); ++c) {
    EXPECT_LT(std::abs(lhs.values()[c] - (ca * fa.values()[c] + cb * fb.values()[c])), 1e-12);
  }
  std::vector<GridPoint> pts;
  for (std::size_t i = 0; i < g.nx; i += 7) pts.push_back({i, (i * 5) % g.nw});
  const auto at = fock_convolve_at(a, k, pts);
  for (std::size_t q = 0; q < pts.size(); ++q) EXPECT_EQ(at[q], fa.at(pts[q].i, pts[q].j));

  const auto zero = fock_convolve(FockRepr(g), k);
  for (const auto& c : zero.values()) EXPECT_EQ(c, Complex{});
}

TEST(FockConvolve, RejectsDiscWiderThanGrid) {
  const auto g = TFGrid::symmetric(1.0, 1.0 / 8.0);
  EXPECT_THROW(fock_convolve(FockRepr(g), DiscKernel{0.5}), GeometryError);
}

TEST(LocalReproducing, HoldsForShiftCombinationsAtSeveralRadii) {
  Rng rng(59);
  const auto sg = test::fine_signal();
  const auto g = test::fine_grid();
  const auto probes = probes_within(g, 2.0, 8);
  for (int trial = 0; trial < 3; ++trial) {
    const auto f = bargmann_from_stft(stft(test::random_atoms(sg, rng, 3, 1.5), g));
    for (double R : {0.5, 1.0, 2.0}) {
      EXPECT_LE(local_reproducing_check(f, R, probes).max_residual, 1e-3) << "R=" << R;
    }
  }
}

TEST(LocalReproducing, ZeroInputHasZeroResidual) {
  const auto g = test::default_grid();
  const auto rep = local_reproducing_check(FockRepr(g), 1.0, probes_within(g, 2.0, 8));
  EXPECT_EQ(rep.max_residual, 0.0);
}

TEST(LocalReproducing, ResidualShrinksUnderRefinement) {
  const auto coarse_sg = SignalGeometry{128, 1.0 / 8.0, -8.0};
  const auto coarse_g = TFGrid::symmetric(6.0, 1.0 / 8.0);
  const auto mid_sg = test::default_signal();
  const auto mid_g = TFGrid::symmetric(6.0, 1.0 / 16.0);
  const auto fine_sg = test::fine_signal();
  const auto fine_g = test::fine_grid();
  for (double R : {0.5, 1.0, 2.0}) {
    const double r8 = local_reproducing_check(window_bargmann(coarse_sg, coarse_g), R, probes_within(coarse_g, 2.0)).max_residual;
    const double r16 = local_reproducing_check(window_bargmann(mid_sg, mid_g), R, probes_within(mid_g, 2.0, 2)).max_residual;
    const double r32 = local_reproducing_check(window_bargmann(fine_sg, fine_g), R, probes_within(fine_g, 2.0, 4)).max_residual;
    EXPECT_LE(r16, r8 * 1.05) << "R=" << R;
    EXPECT_LE(r32, r16 * 1.05) << "R=" << R;
  }
}

TEST(LocalReproducing, RejectsProbesNearTheBoundary) {
  const auto g = test::default_grid();
  EXPECT_THROW(local_reproducing_check(FockRepr(g), 1.0, {{0, 128}}), GeometryError);
}
