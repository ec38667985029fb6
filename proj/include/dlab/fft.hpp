#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace dlab {

/// Owning FFTW plan for an in-place complex transform of fixed length.
/// Planning is serialized internally; execute() on distinct objects may run
/// concurrently.
class FftPlan {
 public:
  enum class Direction { forward, backward };

  FftPlan(std::size_t n, Direction dir);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  FftPlan(FftPlan&& other) noexcept;
  FftPlan& operator=(FftPlan&& other) noexcept;

  std::size_t size() const { return n_; }

  /// Unnormalized DFT with kernel exp(-+2 pi i n j / N) in place.
  void execute(std::span<std::complex<double>> data) const;

 private:
  void release();

  std::size_t n_ = 0;
  void* plan_ = nullptr;
  std::complex<double>* buffer_ = nullptr;
};

}  // namespace dlab
