#include <gtest/gtest.h>

#include "psieve/density.hpp"
#include "psieve/oracle.hpp"
#include "psieve/recover.hpp"
#include "psieve/stft.hpp"
#include "support.hpp"

using namespace psieve;

namespace {

double rel_signal_error(const Signal& a, const Signal& b) {
  double num = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) num += std::abs(a.samples()[k] - b.samples()[k]);
  return num * a.dt() / b.norm1();
}

Signal normalized(const Signal& f, const TFGrid& g) {
  const double s = 1.0 / tf_norm(stft(f, g), Norm::L1);
  std::vector<Complex> v(f.samples());
  for (auto& c : v) c *= s;
  return Signal(std::move(v), f.geometry());
}

// Random cells inside |x|, |w| <= box, redrawn until rho_outer(., 1) <= max_rho.
Mask sparse_mask(const TFGrid& g, Rng& rng, double p, double box, double max_rho) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<std::uint8_t> cells(g.size(), 0);
    for (std::size_t i = 0; i < g.nx; ++i) {
      for (std::size_t j = 0; j < g.nw; ++j) {
        if (std::abs(g.x(i)) <= box && std::abs(g.w(j)) <= box) cells[g.index(i, j)] = rng.bernoulli(p) ? 1 : 0;
      }
    }
    Mask m(g, std::move(cells));
    if (nyquist_density(m, 1.0, {RasterMode::Outer, 1}).rho <= max_rho) return m;
  }
  throw std::runtime_error("no admissible mask");
}

}  // namespace

TEST(OpNorm, MatchesDenseSingularValueOnToyGeometry) {
  const auto sg = test::toy_signal();
  const auto g = test::toy_grid();
  const auto sv = oracle::weighted_singular_values(oracle::dense_stft_operator(sg, g));
  const double L = op_norm_power(sg, g, 200);
  EXPECT_NEAR(L, sv.front(), 1e-4 * sv.front());
  EXPECT_LE(L, sv.front() * (1.0 + 1e-12));
}

TEST(OpNorm, MoreIterationsNeverDecreaseTheEstimate) {
  const auto sg = test::default_signal();
  const auto g = test::default_grid();
  double prev = 0.0;
  for (int iters : {10, 20, 40, 80}) {
    const double L = op_norm_power(sg, g, iters, 5);
    EXPECT_GE(L, prev - 1e-12);
    prev = L;
  }
  EXPECT_THROW(op_norm_power(sg, g, 5), InvalidArgument);
}

TEST(OpNorm, ScalesWithTheSquareRootOfTheCellArea) {
  const auto sg = test::toy_signal();
  const auto g = test::toy_grid();
  auto op = oracle::dense_stft_operator(sg, g);
  const double base = oracle::weighted_singular_values(op).front();
  const double c = 1.7;
  op.dA *= c * c;
  EXPECT_NEAR(oracle::weighted_singular_values(op).front(), c * base, 1e-12 * c * base);
}

TEST(SolverParams, Validation) {
  SolverParams p;
  EXPECT_NO_THROW(p.validate());
  p.step_ratio = 1.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = {};
  p.max_iters = 0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = {};
  p.restart_every = -1;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = {};
  p.gap_tol = 0.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
}

TEST(Denoise, ZeroNoiseRecoversTheSignal) {
  Rng rng(103);
  const auto sg = test::default_signal();
  const auto g = test::default_grid();
  for (int trial = 0; trial < 3; ++trial) {
    const auto f = normalized(test::random_atoms(sg, rng, 1 + trial, 5.0), g);
    const auto res = denoise_l1(stft(f, g), sg);
    EXPECT_LE(rel_signal_error(res.recovered, f), 1e-4);
    EXPECT_LE(res.iterations, 20000);
    EXPECT_EQ(res.status, SolverStatus::Converged);
    EXPECT_LE(res.gap_trace.back(), SolverParams{}.gap_tol);
  }
}

TEST(Denoise, SparseNoiseBelowThresholdIsRemoved) {
  Rng rng(107);
  const auto sg = test::default_signal();
  const auto g = test::default_grid();
  const auto f = normalized(test::random_atoms(sg, rng, 3, 5.0), g);
  const auto v = stft(f, g);
  const auto m = sparse_mask(g, rng, 0.08, 6.0, 0.4);
  ASSERT_LT(nyquist_density(m, 1.0, {RasterMode::Outer, 1}).rho, denoise_threshold(1.0));
  const double vmax = tf_norm(v, Norm::Linf);
  std::vector<Complex> obs(v.values());
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (m.cells()[c]) obs[c] += -v.values()[c] + 2.0 * vmax * rng.complex_normal();
  }
  const auto res = denoise_l1(TFRepr(g, obs), sg);
  EXPECT_EQ(res.status, SolverStatus::Converged);
  EXPECT_LE(rel_signal_error(res.recovered, f), 1e-2);
}

TEST(Denoise, ThresholdValues) {
  EXPECT_NEAR(denoise_threshold(1.0), 0.4784, 5e-5);
  EXPECT_NEAR(inpaint_threshold(1.0), 0.956786, 5e-7);
  EXPECT_DOUBLE_EQ(2.0 * denoise_threshold(0.7), inpaint_threshold(0.7));
}

TEST(Denoise, MatchesTheLpOracleOnTinyInstances) {
  const SignalGeometry sg{8, 0.25, -1.0};
  const TFGrid g{12, 12, 0.25, 0.5, -1.5, -3.0};
  const auto op = oracle::dense_stft_operator(sg, g);
  const double band = oracle::lp_facet_band();
  Rng rng(109);
  for (int trial = 0; trial < 3; ++trial) {
    auto vals = stft(test::random_samples(sg, rng), g).values();
    for (auto& v : vals) {
      if (rng.bernoulli(0.1)) v += 0.5 * rng.complex_normal();
    }
    const TFRepr G(g, vals);
    const auto lp = oracle::lp_l1_oracle(op, G);
    SolverParams p;
    p.gap_tol = 1e-9;
    const auto res = denoise_l1(G, sg, p);
    EXPECT_GE(res.residual_l1, lp.optimum - 1e-6);
    EXPECT_LE(res.residual_l1, lp.optimum * (1.0 + band) + 1e-6);
    EXPECT_LE(res.residual_l1, lp.modulus_objective + 1e-6);
  }
}

TEST(Denoise, GapTraceIsNonnegativeAndResidualMatchesDefinition) {
  Rng rng(113);
  const auto sg = test::default_signal();
  const auto g = test::default_grid();
  const auto f = normalized(test::random_atoms(sg, rng, 2, 4.0), g);
  auto obs = stft(f, g).values();
  for (auto& c : obs) {
    if (rng.bernoulli(0.02)) c += 0.05 * rng.complex_normal();
  }
  const TFRepr G(g, obs);
  const auto res = denoise_l1(G, sg);
  for (double gap : res.gap_trace) EXPECT_GE(gap, -1e-12);
  const auto vr = stft(res.recovered, g);
  std::vector<Complex> diff(g.size());
  for (std::size_t c = 0; c < g.size(); ++c) diff[c] = obs[c] - vr.values()[c];
  EXPECT_NEAR(res.residual_l1, tf_norm(TFRepr(g, diff), Norm::L1), 1e-12);
  EXPECT_EQ(res.objective_trace.size(), static_cast<std::size_t>(res.iterations));
  EXPECT_GT(res.op_norm, 0.0);
}

TEST(Denoise, IsBitwiseDeterministic) {
  Rng rng(127);
  const auto sg = test::default_signal();
  const auto g = test::default_grid();
  auto obs = stft(test::random_atoms(sg, rng, 2, 4.0), g).values();
  for (auto& c : obs) {
    if (rng.bernoulli(0.05)) c += rng.complex_normal();
  }
  const TFRepr G(g, obs);
  SolverParams p;
  p.max_iters = 300;
  const auto a = denoise_l1(G, sg, p);
  const auto b = denoise_l1(G, sg, p);
  EXPECT_EQ(a.recovered.samples(), b.recovered.samples());
  EXPECT_EQ(a.objective_trace, b.objective_trace);
  EXPECT_EQ(a.gap_trace, b.gap_trace);
}

TEST(Denoise, FixedStepRuleIsAvailable) {
  Rng rng(131);
  const auto sg = test::default_signal();
  const auto g = test::default_grid();
  const auto f = normalized(test::random_atoms(sg, rng, 1, 3.0), g);
  SolverParams p;
  p.restart_every = 0;
  const auto res = denoise_l1(stft(f, g), sg, p);
  EXPECT_LE(rel_signal_error(res.recovered, f), 1e-4);
}

TEST(Inpaint, EmptyMaskIsIdenticalToDenoise) {
  Rng rng(137);
  const auto sg = test::default_signal();
  const auto g = test::default_grid();
  auto obs = stft(test::random_atoms(sg, rng, 2, 4.0), g).values();
  for (auto& c : obs) {
    if (rng.bernoulli(0.05)) c += rng.complex_normal();
  }
  const TFRepr G(g, obs);
  SolverParams p;
  p.max_iters = 400;
  const auto a = denoise_l1(G, sg, p);
  const auto b = inpaint_l1(G, Mask(g), sg, p);
  EXPECT_EQ(a.recovered.samples(), b.recovered.samples());
  EXPECT_EQ(a.objective_trace, b.objective_trace);
  EXPECT_EQ(a.residual_l1, b.residual_l1);
}

TEST(Inpaint, RejectsFullMaskAndMismatchedGrid) {
  const auto sg = test::default_signal();
  const auto g = test::default_grid();
  EXPECT_THROW(inpaint_l1(TFRepr(g), Mask::full(g), sg), InvalidArgument);
  EXPECT_THROW(inpaint_l1(TFRepr(g), Mask(test::toy_grid()), sg), GeometryError);
}

TEST(Inpaint, NoiselessDataBelowThresholdIsRecovered) {
  Rng rng(139);
  const auto sg = test::default_signal();
  const auto g = test::default_grid();
  const auto f = normalized(test::random_atoms(sg, rng, 3, 5.0), g);
  const auto v = stft(f, g);
  const auto m = sparse_mask(g, rng, 0.15, 5.0, 0.7);
  ASSERT_LT(nyquist_density(m, 1.0, {RasterMode::Outer, 1}).rho, inpaint_threshold(1.0));
  auto obs = restrict_to(v, m.complement()).values();
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (m.cells()[c]) obs[c] = 10.0 * rng.complex_normal();
  }
  const auto res = inpaint_l1(TFRepr(g, obs), m, sg);
  const auto vr = stft(res.recovered, g);
  std::vector<Complex> diff(g.size());
  for (std::size_t c = 0; c < g.size(); ++c) diff[c] = v.values()[c] - vr.values()[c];
  EXPECT_LE(tf_norm(TFRepr(g, diff), Norm::L1), 1e-2);
}

TEST(Inpaint, NoisyErrorRespectsTheMissingDataBound) {
  Rng rng(149);
  const auto sg = test::default_signal();
  const auto g = test::default_grid();
  const auto f = normalized(test::random_atoms(sg, rng, 2, 5.0), g);
  const auto v = stft(f, g);
  const auto m = sparse_mask(g, rng, 0.15, 5.0, 0.7);
  const double rho = nyquist_density(m, 1.0, {RasterMode::Outer, 1}).rho;
  const double eps = 0.01;
  std::vector<Complex> noise(g.size());
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (!m.cells()[c]) noise[c] = rng.complex_normal();
  }
  const double nl1 = tf_norm(TFRepr(g, noise), Norm::L1);
  std::vector<Complex> obs(g.size());
  for (std::size_t c = 0; c < g.size(); ++c) obs[c] = m.cells()[c] ? Complex{} : v.values()[c] + noise[c] * (eps / nl1);
  const auto res = inpaint_l1(TFRepr(g, obs), m, sg);
  const auto vr = stft(res.recovered, g);
  std::vector<Complex> diff(g.size());
  for (std::size_t c = 0; c < g.size(); ++c) diff[c] = v.values()[c] - vr.values()[c];
  const auto bound = missing_data_bound(eps, rho, 1.0);
  ASSERT_TRUE(bound.has_value());
  EXPECT_LE(tf_norm(TFRepr(g, diff), Norm::L1), *bound * 1.05);
}

TEST(MissingDataBound, ClosedFormValues) {
  EXPECT_EQ(*missing_data_bound(0.0, 0.3, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(*missing_data_bound(0.02, 0.0, 1.0), 0.04);
  EXPECT_NEAR(*missing_data_bound(0.02, denoise_threshold(1.0), 1.0), 0.08, 1e-15);
  EXPECT_NEAR(*missing_data_bound(0.02, 0.5, 0.8), 2 * 0.02 * inpaint_threshold(0.8) / (inpaint_threshold(0.8) - 0.5),
              1e-15);
  EXPECT_GT(*missing_data_bound(0.02, inpaint_threshold(1.0) * (1.0 - 1e-9), 1.0), 1e6);
  EXPECT_FALSE(missing_data_bound(0.02, inpaint_threshold(1.0), 1.0).has_value());
  EXPECT_FALSE(missing_data_bound(0.02, 2.0, 1.0).has_value());
  double prev = 0.0;
  for (double rho = 0.0; rho < 0.9; rho += 0.1) {
    const double b = *missing_data_bound(0.01, rho, 1.0);
    EXPECT_GT(b, prev);
    prev = b;
  }
}
