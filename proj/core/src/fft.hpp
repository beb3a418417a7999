#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace psieve::detail {

/// In-place unnormalized complex DFT of fixed length backed by FFTW.
/// Plans are built with FFTW_ESTIMATE so the transform is bitwise reproducible;
/// execute() is safe to call concurrently on distinct buffers.
class FftPlan {
 public:
  enum class Direction { Forward, Backward };

  FftPlan(std::size_t n, Direction dir);
  ~FftPlan();
  FftPlan(FftPlan&&) noexcept;
  FftPlan& operator=(FftPlan&&) noexcept;
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const { return n_; }
  void execute(std::span<std::complex<double>> data) const;

 private:
  std::size_t n_ = 0;
  void* plan_ = nullptr;
};

}  // namespace psieve::detail
