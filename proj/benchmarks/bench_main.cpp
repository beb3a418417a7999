#include <benchmark/benchmark.h>

#include "psieve/density.hpp"
#include "psieve/fock.hpp"
#include "psieve/random.hpp"
#include "psieve/recover.hpp"
#include "psieve/stft.hpp"

using namespace psieve;

namespace {

const SignalGeometry kSignal{256, 1.0 / 16.0, -8.0};
const TFGrid kGrid = TFGrid::symmetric(8.0, 1.0 / 16.0);

Signal random_signal(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Complex> s(kSignal.n);
  for (auto& v : s) v = rng.complex_normal();
  return Signal(std::move(s), kSignal);
}

Mask random_mask(double p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint8_t> cells(kGrid.size());
  for (auto& c : cells) c = rng.bernoulli(p) ? 1 : 0;
  return Mask(kGrid, std::move(cells));
}

void BM_StftForward(benchmark::State& state) {
  const StftOperator op(kSignal, kGrid);
  const auto f = random_signal(1);
  for (auto _ : state) benchmark::DoNotOptimize(op.forward(f));
}
BENCHMARK(BM_StftForward)->Unit(benchmark::kMillisecond);

void BM_StftAdjoint(benchmark::State& state) {
  const StftOperator op(kSignal, kGrid);
  const auto v = op.forward(random_signal(2));
  for (auto _ : state) benchmark::DoNotOptimize(op.adjoint(v));
}
BENCHMARK(BM_StftAdjoint)->Unit(benchmark::kMillisecond);

void BM_NyquistDensity(benchmark::State& state) {
  const auto m = random_mask(0.1, 3);
  const double R = static_cast<double>(state.range(0)) / 4.0;
  for (auto _ : state) benchmark::DoNotOptimize(nyquist_density(m, R, {RasterMode::Outer, 1}));
}
BENCHMARK(BM_NyquistDensity)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_FockConvolve(benchmark::State& state) {
  const TFGrid g = TFGrid::symmetric(4.0, 1.0 / 16.0);
  const auto f = bargmann_from_stft(stft(gaussian_window(kSignal.n, kSignal.dt, 0.0), g));
  const double R = static_cast<double>(state.range(0)) / 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(fock_convolve(f, DiscKernel{R}));
}
BENCHMARK(BM_FockConvolve)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_OpNormPower(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(op_norm_power(kSignal, kGrid, 100));
}
BENCHMARK(BM_OpNormPower)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
