#include <gtest/gtest.h>

#include "psieve/fock.hpp"
#include "psieve/oracle.hpp"
#include "psieve/recover.hpp"
#include "psieve/stft.hpp"
#include "support.hpp"

using namespace psieve;

namespace {

struct ContinuousAtoms {
  std::vector<Complex> c;
  std::vector<double> x, w;

  Complex operator()(double t) const {
    Complex s{};
    for (std::size_t a = 0; a < c.size(); ++a) s += c[a] * test::atom(t, x[a], w[a]);
    return s;
  }

  Signal sample(const SignalGeometry& g) const {
    std::vector<Complex> v(g.n);
    for (std::size_t k = 0; k < g.n; ++k) v[k] = (*this)(g.time(k));
    return Signal(std::move(v), g);
  }
};

ContinuousAtoms random_continuous(Rng& rng, int count, double box) {
  ContinuousAtoms a;
  for (int k = 0; k < count; ++k) {
    a.c.push_back(rng.complex_normal());
    a.x.push_back(rng.uniform(-box, box));
    a.w.push_back(rng.uniform(-box, box));
  }
  return a;
}

FockRepr window_bargmann(const SignalGeometry& sg, const TFGrid& g) {
  return bargmann_from_stft(stft(gaussian_window(sg.n, sg.dt, 0.0), g));
}

}  // namespace

TEST(QuadratureStft, WindowAutocorrelationAtOrigin) {
  const oracle::ContinuousSignal f{[](double t) { return Complex(gaussian(t)); }, -10.0, 10.0};
  const auto v = oracle::quadrature_stft(f, {{0.0, 0.0}}, 1e-12);
  EXPECT_NEAR(v[0].real(), 1.0, 1e-10);
  EXPECT_NEAR(v[0].imag(), 0.0, 1e-10);
}

TEST(QuadratureStft, ZeroFunctionGivesZero) {
  const oracle::ContinuousSignal f{[](double) { return Complex{}; }, -5.0, 5.0};
  for (const auto& c : oracle::quadrature_stft(f, {{0.0, 0.0}, {1.0, -2.0}})) EXPECT_EQ(c, Complex{});
}

TEST(QuadratureStft, AgreesWithTheFastStftOnFiftyPoints) {
  Rng rng(151);
  const auto sg = test::default_signal();
  const auto g = test::default_grid();
  const auto atoms = random_continuous(rng, 3, 4.0);
  const auto v = stft(atoms.sample(sg), g);
  std::vector<std::pair<double, double>> pts;
  std::vector<Complex> fast;
  for (int k = 0; k < 50; ++k) {
    const auto i = static_cast<std::size_t>(rng.integer(32, 224));
    const auto j = static_cast<std::size_t>(rng.integer(32, 224));
    pts.emplace_back(g.x(i), g.w(j));
    fast.push_back(v.at(i, j));
  }
  const oracle::ContinuousSignal f{atoms, sg.t0, sg.t_last()};
  const auto slow = oracle::quadrature_stft(f, pts, 1e-10);
  for (std::size_t k = 0; k < pts.size(); ++k) EXPECT_LT(std::abs(slow[k] - fast[k]), 1e-6) << k;
}

TEST(QuadratureStft, RejectsBadArguments) {
  EXPECT_THROW(oracle::quadrature_stft({{}, 0.0, 1.0}, {{0.0, 0.0}}), InvalidArgument);
  EXPECT_THROW(oracle::quadrature_stft({[](double) { return Complex{}; }, 1.0, 1.0}, {{0.0, 0.0}}), InvalidArgument);
}

TEST(DenseOperator, AdjointIdentityAndSizeLimit) {
  Rng rng(157);
  const auto sg = test::toy_signal();
  const auto g = test::toy_grid();
  const auto op = oracle::dense_stft_operator(sg, g);
  EXPECT_EQ(op.rows, g.size());
  EXPECT_EQ(op.cols, sg.n);
  const auto f = test::random_samples(sg, rng);
  const auto v = test::random_field(g, rng);
  const Complex lhs = test::inner(op.apply(f.samples()), v.values()) * op.dA;
  const Complex rhs = test::inner(f.samples(), op.apply_adjoint(v.values())) * op.dt;
  EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::abs(lhs));
  EXPECT_THROW(oracle::dense_stft_operator(test::default_signal(), test::default_grid(), 1000), InvalidArgument);
}

TEST(LpOracle, NoiselessDataHasZeroOptimum) {
  Rng rng(163);
  const SignalGeometry sg{8, 0.25, -1.0};
  const TFGrid g{12, 12, 0.25, 0.5, -1.5, -3.0};
  const auto op = oracle::dense_stft_operator(sg, g);
  const auto f = test::random_samples(sg, rng);
  const TFRepr G(g, op.apply(f.samples()));
  const auto lp = oracle::lp_l1_oracle(op, G);
  EXPECT_NEAR(lp.optimum, 0.0, 1e-9);
  EXPECT_LT(lp.modulus_objective, 1e-8);
  ASSERT_EQ(lp.minimizer.size(), sg.n);
  for (std::size_t k = 0; k < sg.n; ++k) EXPECT_NEAR(std::abs(lp.minimizer[k] - f.samples()[k]), 0.0, 1e-7);
}

TEST(LpOracle, FacetBandBracketsTheModulusObjective) {
  Rng rng(167);
  const SignalGeometry sg{8, 0.25, -1.0};
  const TFGrid g{12, 12, 0.25, 0.5, -1.5, -3.0};
  const auto op = oracle::dense_stft_operator(sg, g);
  EXPECT_NEAR(oracle::lp_facet_band(), 1.0 / std::cos(std::numbers::pi / 64.0) - 1.0, 1e-15);
  auto vals = op.apply(test::random_samples(sg, rng).samples());
  for (auto& v : vals) v += 0.3 * rng.complex_normal();
  const TFRepr G(g, vals);
  const auto lp = oracle::lp_l1_oracle(op, G);
  EXPECT_GT(lp.optimum, 0.0);
  EXPECT_GE(lp.modulus_objective, lp.optimum * (1.0 - 1e-9));
  EXPECT_LE(lp.modulus_objective, lp.optimum * (1.0 + oracle::lp_facet_band()) + 1e-9);

  const auto masked = oracle::lp_l1_oracle(op, G, Mask(g));
  EXPECT_NEAR(masked.optimum, lp.optimum, 1e-12);
}

TEST(LpOracle, MaskedCellsAreIgnored) {
  Rng rng(173);
  const SignalGeometry sg{8, 0.25, -1.0};
  const TFGrid g{12, 12, 0.25, 0.5, -1.5, -3.0};
  const auto op = oracle::dense_stft_operator(sg, g);
  const auto f = test::random_samples(sg, rng);
  auto vals = op.apply(f.samples());
  const auto m = test::random_mask(g, rng, 0.3);
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (m.cells()[c]) vals[c] = 100.0 * rng.complex_normal();
  }
  const auto lp = oracle::lp_l1_oracle(op, TFRepr(g, vals), m);
  EXPECT_NEAR(lp.optimum, 0.0, 1e-9);
}

TEST(LpOracle, RefusesLargeInstances) {
  const auto sg = test::toy_signal();
  const auto g = test::toy_grid();
  const auto op = oracle::dense_stft_operator(sg, g);
  EXPECT_THROW(oracle::lp_l1_oracle(op, TFRepr(g)), InvalidArgument);
}

TEST(NuCheck, WindowRatioIsTheDiscMass) {
  const auto sg = test::default_signal();
  const auto g = test::default_grid();
  const auto rep = oracle::nu_check(1.0, {window_bargmann(sg, g)});
  EXPECT_NEAR(rep.constant, 0.956786, 5e-7);
  EXPECT_LE(rep.max_abs_deviation, 2e-3);
}

TEST(NuCheck, RatioIsScaleInvariant) {
  const auto sg = test::default_signal();
  const auto g = test::default_grid();
  const auto f = window_bargmann(sg, g);
  std::vector<Complex> scaled(f.values());
  for (auto& c : scaled) c *= Complex(-3.0, 4.0);
  const auto rep = oracle::nu_check(1.0, {f, FockRepr(g, scaled)});
  EXPECT_NEAR(rep.ratios[0], rep.ratios[1], 1e-12);
}

TEST(NuCheck, DeviationShrinksUnderRefinement) {
  const SignalGeometry coarse_sg{128, 1.0 / 8.0, -8.0};
  const auto coarse = oracle::nu_check(1.0, {window_bargmann(coarse_sg, TFGrid::symmetric(6.0, 1.0 / 8.0))});
  const auto mid = oracle::nu_check(1.0, {window_bargmann(test::default_signal(), TFGrid::symmetric(6.0, 1.0 / 16.0))});
  const auto fine = oracle::nu_check(1.0, {window_bargmann(test::fine_signal(), test::fine_grid())});
  EXPECT_LE(mid.max_abs_deviation, coarse.max_abs_deviation * 1.05);
  EXPECT_LE(fine.max_abs_deviation, mid.max_abs_deviation * 1.05);
  EXPECT_LE(fine.max_abs_deviation, 2e-3);
}
