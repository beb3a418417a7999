#include "fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

#include "psieve/types.hpp"

namespace psieve::detail {

namespace {
// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftPlan::FftPlan(std::size_t n, Direction dir) : n_(n) {
  if (n == 0) throw InvalidArgument("fft: zero length");
  std::vector<std::complex<double>> scratch(n);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard lock(planner_mutex());
  plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan_ == nullptr) throw Error("fft: planner failed");
}

FftPlan::~FftPlan() {
  if (plan_ != nullptr) {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  }
}

FftPlan::FftPlan(FftPlan&& other) noexcept : n_(other.n_), plan_(other.plan_) { other.plan_ = nullptr; }

FftPlan& FftPlan::operator=(FftPlan&& other) noexcept {
  if (this != &other) {
    if (plan_ != nullptr) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(static_cast<fftw_plan>(plan_));
    }
    n_ = other.n_;
    plan_ = other.plan_;
    other.plan_ = nullptr;
  }
  return *this;
}

void FftPlan::execute(std::span<std::complex<double>> data) const {
  if (data.size() != n_) throw InvalidArgument("fft: buffer length mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(plan_), buf, buf);
}

}  // namespace psieve::detail
