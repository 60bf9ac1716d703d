#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "mimosar/flops.hpp"
#include "mimosar/radar_config.hpp"
#include "mimosar/spectral.hpp"
#include "mimosar/synth.hpp"

namespace mimosar {

/// One target found in a frame, in radar-relative polar coordinates.
struct Detection {
  double range_m = 0.0;
  double radial_velocity_mps = 0.0;  // dr/dt, negative when closing
  double azimuth_rad = 0.0;          // positive towards +x
  double amplitude = 0.0;            // squared non-coherent sum at (m_r, m_v)
  std::size_t m_r = 0;
  std::size_t m_v = 0;
  std::size_t m_theta = 0;
};

struct CfarParams {
  std::size_t training_cells = 8;  // per side, per axis
  std::size_t guard_cells = 2;     // per side, per axis
  double probability_false_alarm = 1e-4;
};

/// Threshold factor of a cell-averaging CFAR with `training_count` cells.
double cfar_alpha(std::size_t training_count, double probability_false_alarm);

/// Real 2-D map indexed (m_r, m_v), m_r fastest.
class PowerMap {
 public:
  PowerMap() = default;
  PowerMap(std::size_t range_points, std::size_t velocity_points)
      : nr_(range_points), nv_(velocity_points), data_(range_points * velocity_points, 0.0) {}

  std::size_t range_points() const { return nr_; }
  std::size_t velocity_points() const { return nv_; }
  double& at(std::size_t m_r, std::size_t m_v) { return data_[m_r + nr_ * m_v]; }
  double at(std::size_t m_r, std::size_t m_v) const { return data_[m_r + nr_ * m_v]; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t nr_ = 0, nv_ = 0;
  std::vector<double> data_;
};

struct Cell {
  std::size_t m_r = 0;
  std::size_t m_v = 0;
  double power = 0.0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Sum over channels of |S_RV(m_r, m_v, q)|.
PowerMap integrate_noncoherent(const RvMaps& maps, FlopTally* flops = nullptr);

/// Elementwise square, used to turn the summed magnitude into a power map.
PowerMap squared(const PowerMap& map);

/// Cross-shaped CA-CFAR. A cell is a hit when its value exceeds alpha times
/// the mean of its training cells. Near the border the window is truncated
/// and alpha recomputed for the remaining training count. Throws
/// std::invalid_argument when the window does not fit the map or
/// training_cells is zero. Hits are returned in (m_v, m_r) scan order.
std::vector<Cell> cfar_2d(const PowerMap& map, const CfarParams& params, FlopTally* flops = nullptr);

/// Keeps hits that dominate their 3x3 neighbourhood in `map`. Equal
/// neighbours defer to the lexicographically lower (m_r, m_v) index.
std::vector<Cell> peak_group(const std::vector<Cell>& hits, const PowerMap& map,
                             FlopTally* flops = nullptr);

/// Per hit: TDM compensation with the hit's own Doppler, zero-padded angle
/// FFT over the virtual channels, argmax, and conversion to physical units.
/// `maps` must not be TDM-compensated already.
std::vector<Detection> estimate_angles(const std::vector<Cell>& hits, const RvMaps& maps,
                                       const RadarConfig& cfg, std::size_t angle_points = 128,
                                       FlopTally* flops = nullptr);

// Bin-to-unit conversions for the shifted spectra.
double range_of_bin(const RadarConfig& cfg, std::size_t m_r, std::size_t range_points);
double velocity_of_bin(const RadarConfig& cfg, std::size_t m_v, std::size_t velocity_points);
double angle_of_bin(const RadarConfig& cfg, std::size_t m_theta, std::size_t angle_points);

struct DetectorParams {
  std::size_t range_points = 64;
  std::size_t velocity_points = 256;
  std::size_t angle_points = 128;
  Window range_window = Window::rect;
  Window velocity_window = Window::rect;
  CfarParams cfar;
};

/// Range FFT, velocity FFT, non-coherent integration, CFAR on the squared
/// sum, peak grouping and angle estimation for one frame.
std::vector<Detection> detect_frame(const IqCube& cube, const RadarConfig& cfg,
                                    const DetectorParams& params = {}, FlopTally* flops = nullptr);

// CSV rows `frame,r_m,v_r_mps,theta_rad,amplitude,m_r,m_v,m_theta`.
void write_detections_csv(std::ostream& out, std::size_t frame, const std::vector<Detection>& dets,
                          bool header = true);

}  // namespace mimosar
