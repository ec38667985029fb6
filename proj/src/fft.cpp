#include "dlab/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace dlab {

namespace {
std::mutex& plannerMutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftPlan::FftPlan(std::size_t n, Direction dir) : n_(n) {
  if (n == 0) throw std::invalid_argument("FftPlan: zero length");
  std::lock_guard lock(plannerMutex());
  buffer_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (!buffer_) throw std::bad_alloc();
  auto* raw = reinterpret_cast<fftw_complex*>(buffer_);
  plan_ = fftw_plan_dft_1d(static_cast<int>(n), raw, raw,
                           dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD,
                           FFTW_ESTIMATE);
  if (!plan_) {
    fftw_free(buffer_);
    throw std::runtime_error("FftPlan: planning failed");
  }
}

FftPlan::~FftPlan() { release(); }

FftPlan::FftPlan(FftPlan&& other) noexcept
    : n_(std::exchange(other.n_, 0)),
      plan_(std::exchange(other.plan_, nullptr)),
      buffer_(std::exchange(other.buffer_, nullptr)) {}

FftPlan& FftPlan::operator=(FftPlan&& other) noexcept {
  if (this != &other) {
    release();
    n_ = std::exchange(other.n_, 0);
    plan_ = std::exchange(other.plan_, nullptr);
    buffer_ = std::exchange(other.buffer_, nullptr);
  }
  return *this;
}

void FftPlan::release() {
  if (!plan_) return;
  std::lock_guard lock(plannerMutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  fftw_free(buffer_);
  plan_ = nullptr;
  buffer_ = nullptr;
}

void FftPlan::execute(std::span<std::complex<double>> data) const {
  if (data.size() != n_) throw std::invalid_argument("FftPlan: length mismatch");
  std::copy(data.begin(), data.end(), buffer_);
  fftw_execute(static_cast<fftw_plan>(plan_));
  std::copy(buffer_, buffer_ + n_, data.begin());
}

}  // namespace dlab
