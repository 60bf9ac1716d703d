#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mimosar/detector.hpp"
#include "mimosar/flops.hpp"
#include "mimosar/radar_config.hpp"
#include "mimosar/scene.hpp"
#include "mimosar/spectral.hpp"
#include "mimosar/synth.hpp"

namespace mimosar {

struct SarParams {
  std::size_t chirps_per_snapshot = 20;  // K
  double pitch_x_m = 0.01;
  double pitch_y_m = 0.1;
  double roi_height_m = 0.9;                // delta y
  double roi_angle_rad = deg_to_rad(5.0);  // delta theta
  SarFftSizes fft{64, 20, 16};
  Window range_window = Window::rect;
};

/// Axis-aligned rectangle centred on a detection in global coordinates.
struct RoiRect {
  Vec2 center;
  double width_m = 0.0;
  double height_m = 0.0;
};

/// Union of detection rectangles.
struct Roi {
  std::vector<RoiRect> rects;
  bool empty() const { return rects.empty(); }
};

/// Adds one rectangle per detection seen from `radar_position`: centre
/// (x_s + r sin(theta), y_s + r cos(theta)), width r * delta_theta, height
/// delta_y.
void add_to_roi(Roi& roi, const std::vector<Detection>& dets, Vec2 radar_position, double roi_height_m,
                double roi_angle_rad);
Roi build_roi(const std::vector<Detection>& dets, Vec2 radar_position, double roi_height_m,
              double roi_angle_rad);

/// Complex image on the grid (k_x * pitch_x, k_y * pitch_y), k_x in
/// [kx0, kx0 + nx), k_y in [ky0, ky0 + ny). Only active pixels accumulate.
class SarImage {
 public:
  SarImage() = default;
  SarImage(long kx0, long ky0, std::size_t nx, std::size_t ny, double pitch_x_m, double pitch_y_m);

  long kx0() const { return kx0_; }
  long ky0() const { return ky0_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  double pitch_x() const { return pitch_x_; }
  double pitch_y() const { return pitch_y_; }
  double x_of(std::size_t ix) const { return static_cast<double>(kx0_ + static_cast<long>(ix)) * pitch_x_; }
  double y_of(std::size_t iy) const { return static_cast<double>(ky0_ + static_cast<long>(iy)) * pitch_y_; }

  std::size_t index(std::size_t ix, std::size_t iy) const { return ix + nx_ * iy; }
  cplx& at(std::size_t ix, std::size_t iy) { return pixels_[index(ix, iy)]; }
  const cplx& at(std::size_t ix, std::size_t iy) const { return pixels_[index(ix, iy)]; }
  bool active(std::size_t ix, std::size_t iy) const { return active_[index(ix, iy)] != 0; }
  void set_active(std::size_t ix, std::size_t iy, bool on = true) { active_[index(ix, iy)] = on ? 1 : 0; }
  std::size_t active_count() const;

  std::vector<cplx>& pixels() { return pixels_; }
  const std::vector<cplx>& pixels() const { return pixels_; }
  const std::vector<std::uint8_t>& active_mask() const { return active_; }

  std::size_t snapshots = 0;       // accumulated snapshots (or chirps for the baseline)
  std::uint64_t clipped = 0;       // pixel lookups that fell outside the spectrum

 private:
  long kx0_ = 0, ky0_ = 0;
  std::size_t nx_ = 0, ny_ = 0;
  double pitch_x_ = 0.01, pitch_y_ = 0.1;
  std::vector<cplx> pixels_;
  std::vector<std::uint8_t> active_;
};

/// Image covering the ROI's bounding box with ROI pixels active. An empty
/// ROI gives a 1x1 image with no active pixel.
SarImage make_roi_image(const Roi& roi, double pitch_x_m, double pitch_y_m);

/// Fully active image covering [x_min, x_max] x [y_min, y_max].
SarImage make_plane_image(double x_min, double x_max, double y_min, double y_max, double pitch_x_m,
                          double pitch_y_m);

struct PixelGeometry {
  double distance_m;
  double azimuth_rad;  // asin((x_s - x_pixel) / d)
  double x_offset_m;   // x_s - x_pixel
};

/// Distance and angle between the radar and pixel (k_x, k_y). Empty when
/// the radar sits on the pixel.
std::optional<PixelGeometry> pixel_geometry(long kx, long ky, double pitch_x_m, double pitch_y_m,
                                            Vec2 radar_position);

/// Lower range bin of distance d for an M_r point Range FFT.
long range_bin_of(const RadarConfig& cfg, double distance_m, std::size_t range_points);

/// Shifted angle bin of a pixel: M/2 + floor(M h (x_pixel - x_s) / (lambda d)).
long angle_bin_of(const RadarConfig& cfg, double distance_m, double x_offset_m, std::size_t angle_points);

/// exp(j 2 pi f_c 2d / c).
cplx matched_filter(const RadarConfig& cfg, double distance_m);

/// Index of the strongest velocity bin at (m_r, m_theta); ties go to the
/// lowest index.
std::size_t strongest_velocity_bin(const RvaCube& rva, std::size_t m_r, std::size_t m_theta);

/// Sample S(m_r, argmax_v, m_theta) for a pixel at distance d. Empty when a
/// bin falls outside the cube.
std::optional<cplx> lookup_measurement(const RvaCube& rva, const RadarConfig& cfg, double distance_m,
                                       double x_offset_m);

/// Adds H*(d) * S(m_r, m_v, m_theta) to every active pixel for the radar at
/// `radar_position`. Inactive pixels are never touched.
void accumulate_snapshot(SarImage& image, const RvaCube& rva, const RadarConfig& cfg, Vec2 radar_position,
                         FlopTally* flops = nullptr);

struct SarRun {
  SarImage image;
  FlopTally flops;
};

/// Hierarchical backprojection over the ROI: every K chirps of every frame
/// become one RVA cube (range FFT restricted to those chirps, velocity and
/// angle FFTs restricted to range bins the ROI can reach) and are
/// accumulated at the platform position of the snapshot's first chirp.
SarRun image_region(const std::vector<IqCube>& frames, const Trajectory& trajectory, const Roi& roi,
                    const RadarConfig& cfg, const SarParams& params);

/// Time-domain backprojection on one receive channel: every chirp updates
/// every pixel of `plane` through its range profile.
SarRun baseline_backprojection(const std::vector<IqCube>& frames, const Trajectory& trajectory,
                               SarImage plane, const RadarConfig& cfg, std::size_t range_points = 64,
                               std::size_t channel = 0);

/// Range-angle magnitude map (m_r fastest) averaged over all chirps of one
/// frame. No Doppler processing, so no TDM compensation either.
struct RangeAngleImage {
  std::size_t range_points = 0;
  std::size_t angle_points = 0;
  std::vector<double> magnitude;
  FlopTally flops;

  double at(std::size_t m_r, std::size_t m_theta) const { return magnitude[m_r + range_points * m_theta]; }
};

RangeAngleImage range_angle_image(const IqCube& cube, const RadarConfig& cfg, std::size_t range_points = 64,
                                  std::size_t angle_points = 16);

struct ImagePeak {
  std::size_t ix = 0;
  std::size_t iy = 0;
  double x_m = 0.0;
  double y_m = 0.0;
  double magnitude = 0.0;
};

/// Largest-magnitude active pixel; empty for an image without active pixels.
std::optional<ImagePeak> find_peak(const SarImage& image);

/// Largest-magnitude active pixel inside the axis-aligned window.
std::optional<ImagePeak> find_peak_in(const SarImage& image, double x_min, double x_max, double y_min,
                                      double y_max);

// Exports.
/// 8-bit binary PGM of |pixel| scaled to the image maximum.
void write_pgm(std::ostream& out, const SarImage& image);
/// `kx,ky,re,im` for every active pixel.
void write_image_csv(std::ostream& out, const SarImage& image);
/// Flat `key=value` lines in the given order.
void write_key_values(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& kv);
/// FLOP tally as key=value pairs with the given prefix.
void append_flops(std::vector<std::pair<std::string, std::string>>& kv, const std::string& prefix,
                  const FlopTally& flops);

}  // namespace mimosar
