#pragma once

#include <cmath>
#include <cstdint>

namespace mimosar {

// Operation-count model used for the complexity comparison:
//   complex multiply = 6, complex add = 2, real op (add/mul/compare) = 1,
//   sqrt / division / floor / one trig call = 1, FFT of size M = 5 M log2 M.
namespace flop_cost {
inline constexpr std::uint64_t kComplexMul = 6;
inline constexpr std::uint64_t kComplexAdd = 2;
inline constexpr std::uint64_t kMagnitudeSquared = 3;
inline constexpr std::uint64_t kMagnitude = 4;

inline std::uint64_t fft(std::size_t points) {
  if (points < 2) return 0;
  const double m = static_cast<double>(points);
  return static_cast<std::uint64_t>(std::llround(5.0 * m * std::log2(m)));
}
}  // namespace flop_cost

/// Per-stage floating point operation tally. Additive and deterministic.
struct FlopTally {
  std::uint64_t range_fft = 0;
  std::uint64_t velocity_fft = 0;
  std::uint64_t angle_fft = 0;
  std::uint64_t tdm_compensation = 0;
  std::uint64_t detection = 0;       // integration, CFAR, peak grouping
  std::uint64_t backprojection = 0;  // per-pixel geometry, lookup, matched filter, accumulation
  std::uint64_t imaging_other = 0;   // magnitude/averaging for range-angle maps

  std::uint64_t total() const {
    return range_fft + velocity_fft + angle_fft + tdm_compensation + detection + backprojection +
           imaging_other;
  }

  FlopTally& operator+=(const FlopTally& o) {
    range_fft += o.range_fft;
    velocity_fft += o.velocity_fft;
    angle_fft += o.angle_fft;
    tdm_compensation += o.tdm_compensation;
    detection += o.detection;
    backprojection += o.backprojection;
    imaging_other += o.imaging_other;
    return *this;
  }

  friend bool operator==(const FlopTally&, const FlopTally&) = default;
};

inline FlopTally operator+(FlopTally a, const FlopTally& b) { return a += b; }

}  // namespace mimosar
