#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mimosar/common.hpp"
#include "mimosar/radar_config.hpp"
#include "mimosar/scene.hpp"

namespace mimosar {

/// Complex baseband ADC samples of one frame, indexed (sample i, chirp n,
/// virtual receiver q) with i fastest. Virtual receiver q = tx * rx_count + rx.
class IqCube {
 public:
  IqCube() = default;
  IqCube(std::size_t samples, std::size_t chirps, std::size_t channels, std::size_t frame);

  std::size_t samples() const { return samples_; }
  std::size_t chirps() const { return chirps_; }
  std::size_t channels() const { return channels_; }
  std::size_t frame() const { return frame_; }
  double noise_power() const { return noise_power_; }
  void set_noise_power(double p) { noise_power_ = p; }

  cplx& at(std::size_t i, std::size_t n, std::size_t q) { return data_[index(i, n, q)]; }
  const cplx& at(std::size_t i, std::size_t n, std::size_t q) const { return data_[index(i, n, q)]; }

  std::vector<cplx>& data() { return data_; }
  const std::vector<cplx>& data() const { return data_; }

 private:
  std::size_t index(std::size_t i, std::size_t n, std::size_t q) const {
    return i + samples_ * (n + chirps_ * q);
  }

  std::size_t samples_ = 0;
  std::size_t chirps_ = 0;
  std::size_t channels_ = 0;
  std::size_t frame_ = 0;
  double noise_power_ = 0.0;
  std::vector<cplx> data_;
};

/// Per-sample complex noise variance giving ~30 dB single-target SNR after
/// a 64-point Range FFT with unit transmit/receive amplitudes.
inline constexpr double kDefaultNoisePower = 0.016;

/// How the round-trip delay evolves over the chirps of a frame.
///  - linearized: tau_n = tau_0 + 2 v_r n T_c / c with v_r and tau_0 taken
///    from the frame-start geometry (constant Doppler within the frame).
///  - exact: tau_n = 2 |target - radar(n)| / c for every chirp. Keeps the
///    quadratic range term v^2 t^2 / (2r), which the linearized model drops
///    and which reaches a sizeable fraction of a wavelength at a few m/s and
///    short range.
enum class DelayModel { linearized, exact };

DelayModel parse_delay_model(const std::string& name);
std::string to_string(DelayModel model);

/// Synthesizes the de-chirped I-Q samples of frame `frame` for a stationary
/// point-target scene seen from the moving platform `traj`.
///
/// Per target the round-trip delay follows `delay_model`; the angle of arrival is
/// taken from the true geometry at every chirp. Channels fed by transmitter
/// t carry an extra t/N_Tx share of the chirp-to-chirp Doppler phase
/// (TDM slot offset). Circular Gaussian noise of variance `noise_power` is
/// drawn from a stream seeded by (rng_seed, frame).
IqCube synthesize_frame(const RadarConfig& cfg, const Scene& scene, const Trajectory& traj,
                        std::size_t frame, double noise_power, std::uint64_t rng_seed,
                        DelayModel delay_model = DelayModel::linearized);

/// Range rate dr/dt (positive when receding) of `target` seen from a
/// platform at `radar` moving with `velocity`.
double range_rate(Vec2 radar, Vec2 velocity, Vec2 target);

// Binary dump: text header line "N_s N_c N_vrx frame\n" followed by
// interleaved re/im little-endian float64 in (i, n, q) order, i fastest.
void write_iq_cube(std::ostream& out, const IqCube& cube);
IqCube read_iq_cube(std::istream& in);

}  // namespace mimosar
