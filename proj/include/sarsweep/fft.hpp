#pragma once

// Minimal RAII wrapper over FFTW for in-place complex transforms of a fixed size.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>

#include "sarsweep/constants.hpp"

namespace sarsweep {

class FftPlan {
 public:
  FftPlan(std::size_t size, bool inverse) : size_(size) {
    if (size == 0) throw std::invalid_argument("FftPlan: size must be > 0");
    buffer_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size));
    if (!buffer_) throw std::bad_alloc();
    plan_ = fftw_plan_dft_1d(static_cast<int>(size), buffer_, buffer_,
                             inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
    if (!plan_) {
      fftw_free(buffer_);
      throw std::runtime_error("FftPlan: fftw plan creation failed");
    }
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan() {
    fftw_destroy_plan(plan_);
    fftw_free(buffer_);
  }

  std::size_t size() const { return size_; }

  // Unnormalised; the inverse must be scaled by 1/size by the caller.
  std::span<cplx> data() { return {reinterpret_cast<cplx*>(buffer_), size_}; }
  void execute() { fftw_execute(plan_); }

 private:
  std::size_t size_;
  fftw_complex* buffer_ = nullptr;
  fftw_plan plan_ = nullptr;
};

// Plans keyed by (size, direction); not thread-safe, one cache per worker.
class FftCache {
 public:
  FftPlan& forward(std::size_t n) { return get(n, false); }
  FftPlan& inverse(std::size_t n) { return get(n, true); }

 private:
  FftPlan& get(std::size_t n, bool inv) {
    auto& slot = plans_[{n, inv}];
    if (!slot) slot = std::make_unique<FftPlan>(n, inv);
    return *slot;
  }
  std::map<std::pair<std::size_t, bool>, std::unique_ptr<FftPlan>> plans_;
};

// Signed frequency of FFT bin k for an n-point transform at the given sample rate.
inline double bin_frequency(std::size_t k, std::size_t n, double sample_rate) {
  const double df = sample_rate / static_cast<double>(n);
  return k < (n + 1) / 2 ? static_cast<double>(k) * df
                         : (static_cast<double>(k) - static_cast<double>(n)) * df;
}

}  // namespace sarsweep
