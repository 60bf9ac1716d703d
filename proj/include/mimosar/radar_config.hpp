#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "mimosar/common.hpp"

namespace mimosar {

/// FMCW TDM-MIMO radar waveform and array parameters (SI units).
///
/// `chirp_duration_s` is the TDM cycle: the chirp interval times the number
/// of transmitters, so consecutive "chirps" of one virtual channel are
/// `chirp_duration_s` apart. Chirps sit at the start of each frame and the
/// rest of `frame_duration_s` is idle.
struct RadarConfig {
  double carrier_frequency_hz = 77e9;
  double sweep_bandwidth_hz = 335e6;
  double sweep_slope_hz_per_s = 21e12;
  double adc_sampling_rate_sps = 4e6;
  std::size_t samples_per_chirp = 64;
  std::size_t chirps_per_frame = 255;
  double chirp_duration_s = 90e-6;
  double frame_duration_s = 33.3e-3;
  std::size_t tx_count = 2;
  std::size_t rx_count = 4;
  double virtual_rx_spacing_m = kSpeedOfLight / 77e9 / 2.0;
  double initial_phase_rad = 0.0;  // cancels in the de-chirped signal
  double tx_amplitude = 1.0;
  double rx_amplitude = 1.0;

  double wavelength_m() const { return kSpeedOfLight / carrier_frequency_hz; }
  std::size_t virtual_rx_count() const { return tx_count * rx_count; }
  double adc_window_s() const {
    return static_cast<double>(samples_per_chirp) / adc_sampling_rate_sps;
  }

  /// Throws ConfigError when a parameter is non-positive or the ADC window
  /// does not fit the chirp / sweep.
  void validate() const;

  /// Radar used throughout the simulations: 77 GHz, 2 Tx x 4 Rx, h = lambda/2.
  static RadarConfig table1();
};

/// Resolutions and unambiguous limits derived from a RadarConfig.
struct DerivedLimits {
  double range_resolution_m;
  double velocity_resolution_mps;
  double angle_resolution_rad;  // at boresight
  double max_range_m;
  double max_velocity_mps;
  double max_angle_rad;
};

DerivedLimits derive_limits(const RadarConfig& cfg);

/// Largest platform speed for which snapshots taken every
/// `snapshot_interval_s` sample the along-track aperture finely enough to
/// image an azimuth sector of width `azimuth_scope_rad` without aliasing.
double max_platform_speed(const RadarConfig& cfg, double snapshot_interval_s,
                          double azimuth_scope_rad);

struct CpiEstimate {
  double frames;          // closed-form real value
  std::size_t frame_count;  // smallest whole frame count reaching the threshold (ceil)
};

/// Number of frames over which the mean matched-filter phase error caused by
/// a per-frame ego-velocity error of rms `velocity_error_rms_mps` stays below
/// `phase_threshold_rad`.
CpiEstimate cpi_frames(const RadarConfig& cfg, double velocity_error_rms_mps,
                       double phase_threshold_rad);

/// Mean accumulated radial distance error after `frames` frames of i.i.d.
/// Gaussian velocity error (folded normal mean).
double expected_distance_error(const RadarConfig& cfg, double velocity_error_rms_mps,
                               std::size_t frames);

// Flat `key = value` text, keys equal to the RadarConfig field names.
// Blank lines and lines starting with '#' are ignored; unknown or
// duplicate keys are errors. The result is validated.
RadarConfig parse_radar_config(std::istream& in, const std::string& source = "<stream>");
RadarConfig load_radar_config(const std::filesystem::path& path);
void write_radar_config(std::ostream& out, const RadarConfig& cfg);

}  // namespace mimosar
