#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mimosar/common.hpp"
#include "mimosar/flops.hpp"
#include "mimosar/radar_config.hpp"
#include "mimosar/synth.hpp"

namespace mimosar {

enum class Window { rect, hann };

Window parse_window(const std::string& name);
std::string to_string(Window w);
std::vector<double> window_coefficients(Window w, std::size_t length);

/// Dense complex 3-D array, first index fastest.
class ComplexCube {
 public:
  ComplexCube() = default;
  ComplexCube(std::size_t n0, std::size_t n1, std::size_t n2)
      : n0_(n0), n1_(n1), n2_(n2), data_(n0 * n1 * n2, cplx{0.0, 0.0}) {}

  std::size_t dim0() const { return n0_; }
  std::size_t dim1() const { return n1_; }
  std::size_t dim2() const { return n2_; }

  cplx& at(std::size_t a, std::size_t b, std::size_t c) { return data_[a + n0_ * (b + n1_ * c)]; }
  const cplx& at(std::size_t a, std::size_t b, std::size_t c) const {
    return data_[a + n0_ * (b + n1_ * c)];
  }
  std::vector<cplx>& data() { return data_; }
  const std::vector<cplx>& data() const { return data_; }

 private:
  std::size_t n0_ = 0, n1_ = 0, n2_ = 0;
  std::vector<cplx> data_;
};

/// Range spectra S_R(m_r, n, q).
struct RangeProfiles {
  ComplexCube bins;  // [m_r, chirp, channel]
  std::size_t frame = 0;

  std::size_t range_points() const { return bins.dim0(); }
  std::size_t chirps() const { return bins.dim1(); }
  std::size_t channels() const { return bins.dim2(); }
};

/// Range-velocity maps S_RV(m_r, m_v, q), one per virtual channel. The
/// velocity axis is FFT-shifted: bin M_v/2 is zero Doppler.
struct RvMaps {
  ComplexCube bins;  // [m_r, m_v, channel]
  std::size_t frame = 0;
  std::size_t first_chirp = 0;
  std::size_t chirp_count = 0;

  std::size_t range_points() const { return bins.dim0(); }
  std::size_t velocity_points() const { return bins.dim1(); }
  std::size_t channels() const { return bins.dim2(); }
};

/// Range-velocity-angle spectrum S_RVA(m_r, m_v, m_theta) of one snapshot.
/// Velocity and angle axes are FFT-shifted (zero Doppler / boresight at the
/// centre bin).
struct RvaCube {
  ComplexCube bins;  // [m_r, m_v, m_theta]
  std::size_t frame = 0;
  std::size_t first_chirp = 0;
  double t_start_s = 0.0;

  std::size_t range_points() const { return bins.dim0(); }
  std::size_t velocity_points() const { return bins.dim1(); }
  std::size_t angle_points() const { return bins.dim2(); }
};

/// Zero-padded FFT along fast time for every (chirp, channel).
RangeProfiles range_fft(const IqCube& cube, std::size_t range_points, Window window = Window::rect,
                        FlopTally* flops = nullptr);

/// FFT across chirps [first_chirp, first_chirp + chirp_count) for every
/// range bin and channel. When `range_mask` is given only flagged range bins
/// are transformed; the others stay zero.
RvMaps velocity_fft(const RangeProfiles& profiles, std::size_t velocity_points, std::size_t first_chirp,
                    std::size_t chirp_count, Window window = Window::rect, FlopTally* flops = nullptr,
                    const std::vector<bool>* range_mask = nullptr);

/// Chirp-to-chirp Doppler phase represented by shifted velocity bin m_v.
double doppler_phase_of_bin(std::size_t velocity_bin, std::size_t velocity_points);

/// Removes the TDM slot phase t * dphi / N_Tx from channel values ordered
/// [Tx0.Rx0..Rx(N-1), Tx1.Rx0.., ...].
void tdm_compensate(std::span<cplx> channel_values, double doppler_phase, std::size_t tx_count,
                    std::size_t rx_count);

/// Applies tdm_compensate to every (m_r, m_v) cell using the Doppler phase
/// of its own velocity bin.
void tdm_compensate(RvMaps& maps, std::size_t tx_count, std::size_t rx_count, FlopTally* flops = nullptr,
                    const std::vector<bool>* range_mask = nullptr);

/// Zero-padded FFT across channels, FFT-shifted. Throws if the channel count
/// is zero or exceeds `angle_points`.
RvaCube angle_fft(const RvMaps& maps, std::size_t angle_points, FlopTally* flops = nullptr,
                  const std::vector<bool>* range_mask = nullptr);

struct SarFftSizes {
  std::size_t range = 64;
  std::size_t velocity = 20;  // must equal the snapshot length K
  std::size_t angle = 16;
};

/// 3-D FFT of snapshot `snapshot` (chirps [snapshot*K, snapshot*K + K)) of
/// one frame: Range FFT -> Velocity FFT -> TDM compensation -> Angle FFT.
/// The cube records its start time snapshot*K*T_c + frame*T_f.
RvaCube snapshot_rva(const IqCube& cube, std::size_t snapshot, std::size_t chirps_per_snapshot,
                     const RadarConfig& cfg, const SarFftSizes& sizes = {}, Window window = Window::rect,
                     FlopTally* flops = nullptr, const std::vector<bool>* range_mask = nullptr);

/// Same pipeline on precomputed range profiles of the frame.
RvaCube snapshot_rva(const RangeProfiles& profiles, std::size_t snapshot,
                     std::size_t chirps_per_snapshot, const RadarConfig& cfg,
                     const SarFftSizes& sizes = {}, FlopTally* flops = nullptr,
                     const std::vector<bool>* range_mask = nullptr);

// Header "M_r M_v M_theta t_start\n" then interleaved little-endian float64
// re/im with m_r fastest, then m_v, then m_theta.
void write_rva_cube(std::ostream& out, const RvaCube& cube);

}  // namespace mimosar
