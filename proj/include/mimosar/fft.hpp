#pragma once

#include <cstddef>
#include <memory>
#include <span>

#include "mimosar/common.hpp"

namespace mimosar {

/// Forward DFT X[k] = sum_n x[n] exp(-j 2 pi k n / M) of fixed size M,
/// backed by an FFTW plan. Inputs shorter than M are zero-padded.
/// Not thread-safe: one instance per thread (see fft_plan()).
class Fft {
 public:
  explicit Fft(std::size_t points);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
  Fft(Fft&&) noexcept;
  Fft& operator=(Fft&&) noexcept;

  std::size_t size() const { return points_; }

  /// `out` must hold exactly size() values; `in` at most size().
  void forward(std::span<const cplx> in, std::span<cplx> out);

  /// Same, with the spectrum rotated so that bin 0 lands at index size()/2.
  void forward_shifted(std::span<const cplx> in, std::span<cplx> out);

 private:
  struct Impl;
  std::size_t points_ = 0;
  std::unique_ptr<Impl> impl_;
};

/// Per-thread cached transform of the given size.
Fft& fft_plan(std::size_t points);

/// Index of unshifted bin k after an FFT-shift of length m.
inline std::size_t shifted_index(std::size_t k, std::size_t m) { return (k + m / 2) % m; }

/// Signed frequency offset (in bins) of shifted index j.
inline long centered_bin(std::size_t j, std::size_t m) {
  return static_cast<long>(j) - static_cast<long>(m / 2);
}

}  // namespace mimosar
