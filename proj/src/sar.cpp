#include "mimosar/sar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mimosar/fft.hpp"

namespace mimosar {

namespace {

constexpr double kEdgeTolerance = 1e-9;

struct PixelLookup {
  std::size_t pixel;
  std::size_t m_r;
  std::size_t m_theta;
  double distance_m;
};

// Geometry and bin mapping for every active pixel at one radar position.
// Pixels whose bins fall outside the cube are counted in `clipped`.
std::vector<PixelLookup> snapshot_lookups(const SarImage& image, const std::vector<std::size_t>& active,
                                          const RadarConfig& cfg, const SarFftSizes& sizes,
                                          Vec2 radar, std::vector<bool>& range_mask,
                                          std::uint64_t& clipped, FlopTally* flops) {
  std::vector<PixelLookup> out;
  out.reserve(active.size());
  range_mask.assign(sizes.range, false);
  for (std::size_t p : active) {
    const long kx = image.kx0() + static_cast<long>(p % image.nx());
    const long ky = image.ky0() + static_cast<long>(p / image.nx());
    const auto g = pixel_geometry(kx, ky, image.pitch_x(), image.pitch_y(), radar);
    if (!g) {
      ++clipped;
      continue;
    }
    const long mr = range_bin_of(cfg, g->distance_m, sizes.range);
    const long ma = angle_bin_of(cfg, g->distance_m, g->x_offset_m, sizes.angle);
    if (mr < 0 || mr >= static_cast<long>(sizes.range) || ma < 0 || ma >= static_cast<long>(sizes.angle)) {
      ++clipped;
      continue;
    }
    range_mask[static_cast<std::size_t>(mr)] = true;
    out.push_back({p, static_cast<std::size_t>(mr), static_cast<std::size_t>(ma), g->distance_m});
  }
  // dx, dy, squares and sum, sqrt, range bin (mul, floor), angle bin
  // (div, mul, floor, add), four bound checks.
  if (flops) flops->backprojection += static_cast<std::uint64_t>(active.size()) * 16;
  return out;
}

void accumulate_lookups(SarImage& image, const RvaCube& rva, const RadarConfig& cfg,
                        const std::vector<PixelLookup>& lookups, FlopTally* flops) {
  const std::size_t na = rva.angle_points();
  std::vector<long> best_v(rva.range_points() * na, -1);
  std::uint64_t argmax_evaluations = 0;
  auto& px = image.pixels();
  for (const auto& l : lookups) {
    long& v = best_v[l.m_r + rva.range_points() * l.m_theta];
    if (v < 0) {
      v = static_cast<long>(strongest_velocity_bin(rva, l.m_r, l.m_theta));
      ++argmax_evaluations;
    }
    const cplx s = rva.bins.at(l.m_r, static_cast<std::size_t>(v), l.m_theta);
    px[l.pixel] += std::conj(matched_filter(cfg, l.distance_m)) * s;
  }
  ++image.snapshots;
  if (flops) {
    // Phase (mul + trig pair), conjugate multiply and add per pixel; |.|^2
    // and compare per velocity bin for each distinct (m_r, m_theta).
    flops->backprojection += static_cast<std::uint64_t>(lookups.size()) *
                                 (3 + flop_cost::kComplexMul + flop_cost::kComplexAdd) +
                             argmax_evaluations * rva.velocity_points() * (flop_cost::kMagnitudeSquared + 1);
  }
}

std::vector<std::size_t> active_pixels(const SarImage& image) {
  std::vector<std::size_t> out;
  const auto& mask = image.active_mask();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.push_back(i);
  }
  return out;
}

}  // namespace

void add_to_roi(Roi& roi, const std::vector<Detection>& dets, Vec2 radar_position, double roi_height_m,
                double roi_angle_rad) {
  if (!(roi_height_m > 0.0) || !(roi_angle_rad > 0.0)) {
    throw std::invalid_argument("ROI height and angular width must be positive");
  }
  for (const auto& d : dets) {
    RoiRect r;
    r.center = {radar_position.x + d.range_m * std::sin(d.azimuth_rad),
                radar_position.y + d.range_m * std::cos(d.azimuth_rad)};
    r.width_m = d.range_m * roi_angle_rad;
    r.height_m = roi_height_m;
    roi.rects.push_back(r);
  }
}

Roi build_roi(const std::vector<Detection>& dets, Vec2 radar_position, double roi_height_m,
              double roi_angle_rad) {
  Roi roi;
  add_to_roi(roi, dets, radar_position, roi_height_m, roi_angle_rad);
  return roi;
}

SarImage::SarImage(long kx0, long ky0, std::size_t nx, std::size_t ny, double pitch_x_m, double pitch_y_m)
    : kx0_(kx0),
      ky0_(ky0),
      nx_(nx),
      ny_(ny),
      pitch_x_(pitch_x_m),
      pitch_y_(pitch_y_m),
      pixels_(nx * ny, cplx{0.0, 0.0}),
      active_(nx * ny, 0) {
  if (!(pitch_x_m > 0.0) || !(pitch_y_m > 0.0)) throw std::invalid_argument("SarImage: pitch must be positive");
}

std::size_t SarImage::active_count() const {
  return static_cast<std::size_t>(std::count(active_.begin(), active_.end(), std::uint8_t{1}));
}

SarImage make_roi_image(const Roi& roi, double pitch_x_m, double pitch_y_m) {
  if (roi.empty()) return SarImage(0, 0, 1, 1, pitch_x_m, pitch_y_m);
  auto k_lo = [](double v, double pitch) { return static_cast<long>(std::ceil(v / pitch - kEdgeTolerance)); };
  auto k_hi = [](double v, double pitch) { return static_cast<long>(std::floor(v / pitch + kEdgeTolerance)); };
  long x0 = std::numeric_limits<long>::max(), x1 = std::numeric_limits<long>::min();
  long y0 = x0, y1 = x1;
  for (const auto& r : roi.rects) {
    x0 = std::min(x0, k_lo(r.center.x - r.width_m / 2, pitch_x_m));
    x1 = std::max(x1, k_hi(r.center.x + r.width_m / 2, pitch_x_m));
    y0 = std::min(y0, k_lo(r.center.y - r.height_m / 2, pitch_y_m));
    y1 = std::max(y1, k_hi(r.center.y + r.height_m / 2, pitch_y_m));
  }
  if (x1 < x0 || y1 < y0) return SarImage(0, 0, 1, 1, pitch_x_m, pitch_y_m);
  SarImage img(x0, y0, static_cast<std::size_t>(x1 - x0 + 1), static_cast<std::size_t>(y1 - y0 + 1), pitch_x_m,
               pitch_y_m);
  for (const auto& r : roi.rects) {
    const long rx0 = k_lo(r.center.x - r.width_m / 2, pitch_x_m);
    const long rx1 = k_hi(r.center.x + r.width_m / 2, pitch_x_m);
    const long ry0 = k_lo(r.center.y - r.height_m / 2, pitch_y_m);
    const long ry1 = k_hi(r.center.y + r.height_m / 2, pitch_y_m);
    for (long ky = ry0; ky <= ry1; ++ky) {
      for (long kx = rx0; kx <= rx1; ++kx) {
        img.set_active(static_cast<std::size_t>(kx - x0), static_cast<std::size_t>(ky - y0));
      }
    }
  }
  return img;
}

SarImage make_plane_image(double x_min, double x_max, double y_min, double y_max, double pitch_x_m,
                          double pitch_y_m) {
  if (!(x_max >= x_min) || !(y_max >= y_min)) throw std::invalid_argument("make_plane_image: empty extent");
  const long x0 = static_cast<long>(std::ceil(x_min / pitch_x_m - kEdgeTolerance));
  const long x1 = static_cast<long>(std::floor(x_max / pitch_x_m + kEdgeTolerance));
  const long y0 = static_cast<long>(std::ceil(y_min / pitch_y_m - kEdgeTolerance));
  const long y1 = static_cast<long>(std::floor(y_max / pitch_y_m + kEdgeTolerance));
  if (x1 < x0 || y1 < y0) throw std::invalid_argument("make_plane_image: extent smaller than one pixel");
  SarImage img(x0, y0, static_cast<std::size_t>(x1 - x0 + 1), static_cast<std::size_t>(y1 - y0 + 1), pitch_x_m,
               pitch_y_m);
  for (std::size_t iy = 0; iy < img.ny(); ++iy) {
    for (std::size_t ix = 0; ix < img.nx(); ++ix) img.set_active(ix, iy);
  }
  return img;
}

std::optional<PixelGeometry> pixel_geometry(long kx, long ky, double pitch_x_m, double pitch_y_m,
                                            Vec2 radar_position) {
  const double dx = radar_position.x - static_cast<double>(kx) * pitch_x_m;
  const double dy = radar_position.y - static_cast<double>(ky) * pitch_y_m;
  const double d = std::sqrt(dx * dx + dy * dy);
  if (!(d > 0.0)) return std::nullopt;
  return PixelGeometry{d, std::asin(std::clamp(dx / d, -1.0, 1.0)), dx};
}

long range_bin_of(const RadarConfig& cfg, double distance_m, std::size_t range_points) {
  return static_cast<long>(std::floor(2.0 * static_cast<double>(range_points) * cfg.sweep_slope_hz_per_s *
                                      distance_m / (kSpeedOfLight * cfg.adc_sampling_rate_sps)));
}

long angle_bin_of(const RadarConfig& cfg, double distance_m, double x_offset_m, std::size_t angle_points) {
  const double m = static_cast<double>(angle_points);
  return static_cast<long>(angle_points / 2) +
         static_cast<long>(std::floor(-m * cfg.virtual_rx_spacing_m * x_offset_m / (cfg.wavelength_m() * distance_m)));
}

cplx matched_filter(const RadarConfig& cfg, double distance_m) {
  if (distance_m < 0.0) throw std::invalid_argument("matched_filter: negative distance");
  const double cycles = cfg.carrier_frequency_hz * 2.0 * distance_m / kSpeedOfLight;
  return std::polar(1.0, kTwoPi * (cycles - std::floor(cycles)));
}

std::size_t strongest_velocity_bin(const RvaCube& rva, std::size_t m_r, std::size_t m_theta) {
  std::size_t best = 0;
  double best_mag = -1.0;
  for (std::size_t v = 0; v < rva.velocity_points(); ++v) {
    const double m = std::norm(rva.bins.at(m_r, v, m_theta));
    if (m > best_mag) {
      best_mag = m;
      best = v;
    }
  }
  return best;
}

std::optional<cplx> lookup_measurement(const RvaCube& rva, const RadarConfig& cfg, double distance_m,
                                       double x_offset_m) {
  const long mr = range_bin_of(cfg, distance_m, rva.range_points());
  const long ma = angle_bin_of(cfg, distance_m, x_offset_m, rva.angle_points());
  if (mr < 0 || mr >= static_cast<long>(rva.range_points()) || ma < 0 ||
      ma >= static_cast<long>(rva.angle_points())) {
    return std::nullopt;
  }
  const auto r = static_cast<std::size_t>(mr);
  const auto a = static_cast<std::size_t>(ma);
  return rva.bins.at(r, strongest_velocity_bin(rva, r, a), a);
}

void accumulate_snapshot(SarImage& image, const RvaCube& rva, const RadarConfig& cfg, Vec2 radar_position,
                         FlopTally* flops) {
  const SarFftSizes sizes{rva.range_points(), rva.velocity_points(), rva.angle_points()};
  std::vector<bool> mask;
  const auto lookups =
      snapshot_lookups(image, active_pixels(image), cfg, sizes, radar_position, mask, image.clipped, flops);
  accumulate_lookups(image, rva, cfg, lookups, flops);
}

SarRun image_region(const std::vector<IqCube>& frames, const Trajectory& trajectory, const Roi& roi,
                    const RadarConfig& cfg, const SarParams& params) {
  const std::size_t k = params.chirps_per_snapshot;
  if (k == 0 || k > cfg.chirps_per_frame) throw std::invalid_argument("image_region: invalid snapshot length");
  if (frames.size() > trajectory.frame_count()) {
    throw std::invalid_argument("image_region: trajectory covers " + std::to_string(trajectory.frame_count()) +
                                " frames but " + std::to_string(frames.size()) + " were given");
  }
  SarRun run;
  run.image = make_roi_image(roi, params.pitch_x_m, params.pitch_y_m);
  const auto active = active_pixels(run.image);
  if (active.empty()) return run;

  const std::size_t snapshots = cfg.chirps_per_frame / k;
  std::vector<bool> mask;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const IqCube& cube = frames[f];
    for (std::size_t l = 0; l < snapshots; ++l) {
      const Vec2 pos = trajectory.position(cfg, cube.frame(), l * k);
      const auto lookups =
          snapshot_lookups(run.image, active, cfg, params.fft, pos, mask, run.image.clipped, &run.flops);
      const RvaCube rva = snapshot_rva(cube, l, k, cfg, params.fft, params.range_window, &run.flops, &mask);
      accumulate_lookups(run.image, rva, cfg, lookups, &run.flops);
    }
  }
  return run;
}

SarRun baseline_backprojection(const std::vector<IqCube>& frames, const Trajectory& trajectory, SarImage plane,
                               const RadarConfig& cfg, std::size_t range_points, std::size_t channel) {
  if (frames.size() > trajectory.frame_count()) {
    throw std::invalid_argument("baseline_backprojection: trajectory shorter than the frame list");
  }
  SarRun run;
  run.image = std::move(plane);
  const auto active = active_pixels(run.image);
  Fft& fft = fft_plan(range_points);
  std::vector<cplx> in;
  std::vector<cplx> profile(range_points);
  const double bin_scale = 2.0 * static_cast<double>(range_points) * cfg.sweep_slope_hz_per_s /
                           (kSpeedOfLight * cfg.adc_sampling_rate_sps);
  auto& px = run.image.pixels();
  for (const IqCube& cube : frames) {
    if (channel >= cube.channels()) throw std::invalid_argument("baseline_backprojection: no such channel");
    in.resize(cube.samples());
    for (std::size_t n = 0; n < cube.chirps(); ++n) {
      for (std::size_t i = 0; i < cube.samples(); ++i) in[i] = cube.at(i, n, channel);
      fft.forward(in, profile);
      const Vec2 pos = trajectory.position(cfg, cube.frame(), n);
      for (std::size_t p : active) {
        const double dx = pos.x - run.image.x_of(p % run.image.nx());
        const double dy = pos.y - run.image.y_of(p / run.image.nx());
        const double d = std::sqrt(dx * dx + dy * dy);
        const long mr = static_cast<long>(std::floor(bin_scale * d));
        if (mr < 0 || mr >= static_cast<long>(range_points)) {
          ++run.image.clipped;
          continue;
        }
        px[p] += std::conj(matched_filter(cfg, d)) * profile[static_cast<std::size_t>(mr)];
      }
      ++run.image.snapshots;
    }
    // Per chirp: one range FFT; per pixel: distance (6), bin (2), bounds (2),
    // matched filter (3), conjugate multiply and add.
    run.flops.range_fft += cube.chirps() * flop_cost::fft(range_points);
    run.flops.backprojection += static_cast<std::uint64_t>(cube.chirps()) * active.size() *
                                (6 + 2 + 2 + 3 + flop_cost::kComplexMul + flop_cost::kComplexAdd);
  }
  return run;
}

RangeAngleImage range_angle_image(const IqCube& cube, const RadarConfig& cfg, std::size_t range_points,
                                  std::size_t angle_points) {
  if (cube.channels() != cfg.virtual_rx_count()) {
    throw std::invalid_argument("range_angle_image: cube does not match the radar config");
  }
  if (cube.channels() > angle_points) throw std::invalid_argument("range_angle_image: angle FFT too short");
  RangeAngleImage img;
  img.range_points = range_points;
  img.angle_points = angle_points;
  img.magnitude.assign(range_points * angle_points, 0.0);
  const RangeProfiles rp = range_fft(cube, range_points, Window::rect, &img.flops);
  Fft& fft = fft_plan(angle_points);
  std::vector<cplx> chan(cube.channels());
  std::vector<cplx> spec(angle_points);
  for (std::size_t n = 0; n < cube.chirps(); ++n) {
    for (std::size_t m = 0; m < range_points; ++m) {
      for (std::size_t q = 0; q < cube.channels(); ++q) chan[q] = rp.bins.at(m, n, q);
      fft.forward_shifted(chan, spec);
      for (std::size_t a = 0; a < angle_points; ++a) img.magnitude[m + range_points * a] += std::abs(spec[a]);
    }
  }
  const double inv = 1.0 / static_cast<double>(cube.chirps());
  for (auto& v : img.magnitude) v *= inv;
  const std::uint64_t cells = static_cast<std::uint64_t>(range_points) * angle_points;
  img.flops.angle_fft += static_cast<std::uint64_t>(cube.chirps()) * range_points * flop_cost::fft(angle_points);
  img.flops.imaging_other += cube.chirps() * cells * (flop_cost::kMagnitude + 1) + cells;
  return img;
}

std::optional<ImagePeak> find_peak_in(const SarImage& image, double x_min, double x_max, double y_min,
                                      double y_max) {
  std::optional<ImagePeak> best;
  for (std::size_t iy = 0; iy < image.ny(); ++iy) {
    const double y = image.y_of(iy);
    if (y < y_min - kEdgeTolerance || y > y_max + kEdgeTolerance) continue;
    for (std::size_t ix = 0; ix < image.nx(); ++ix) {
      const double x = image.x_of(ix);
      if (!image.active(ix, iy) || x < x_min - kEdgeTolerance || x > x_max + kEdgeTolerance) continue;
      const double m = std::abs(image.at(ix, iy));
      if (!best || m > best->magnitude) best = ImagePeak{ix, iy, x, y, m};
    }
  }
  return best;
}

std::optional<ImagePeak> find_peak(const SarImage& image) {
  const double inf = std::numeric_limits<double>::infinity();
  return find_peak_in(image, -inf, inf, -inf, inf);
}

}  // namespace mimosar
