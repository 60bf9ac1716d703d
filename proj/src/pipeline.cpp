#include "mimosar/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mimosar {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& p, bool binary = false) {
  std::ofstream out(p, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

PlaneExtent default_plane(const Scene& scene) {
  if (scene.targets.empty()) return {-1.0, 1.0, 1.0, 3.0};
  PlaneExtent e{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& t : scene.targets) {
    e.x_min = std::min(e.x_min, t.position_m.x);
    e.x_max = std::max(e.x_max, t.position_m.x);
    e.y_min = std::min(e.y_min, t.position_m.y);
    e.y_max = std::max(e.y_max, t.position_m.y);
  }
  return {e.x_min - 1.0, e.x_max + 1.0, e.y_min - 1.0, e.y_max + 1.0};
}

}  // namespace

OdometryMode parse_odometry_mode(const std::string& name) {
  if (name == "truth") return OdometryMode::truth;
  if (name == "estimated") return OdometryMode::estimated;
  throw ConfigError("unknown odometry mode '" + name + "' (expected truth or estimated)");
}

std::string to_string(OdometryMode mode) { return mode == OdometryMode::truth ? "truth" : "estimated"; }

ScenarioSpec load_scenario(const std::filesystem::path& radar_path, const std::filesystem::path& scene_path,
                           const std::filesystem::path& trajectory_path) {
  ScenarioSpec spec;
  spec.radar = load_radar_config(radar_path);
  spec.scene = load_scene(scene_path);
  spec.trajectory = load_trajectory(trajectory_path);
  return spec;
}

std::size_t frames_to_process(const ScenarioSpec& spec) {
  return spec.frames == 0 ? spec.trajectory.frame_count() : spec.frames;
}

void check_spec(const ScenarioSpec& spec) {
  spec.radar.validate();
  const std::size_t nf = frames_to_process(spec);
  if (spec.trajectory.frame_count() == 0) throw ConfigError("trajectory has no frames");
  if (nf > spec.trajectory.frame_count()) {
    throw ConfigError("requested " + std::to_string(nf) + " frames but the trajectory has " +
                      std::to_string(spec.trajectory.frame_count()));
  }
  const SarParams& s = spec.sar;
  if (s.chirps_per_snapshot == 0 || s.chirps_per_snapshot > spec.radar.chirps_per_frame) {
    throw ConfigError("snapshot length K must lie in [1, chirps_per_frame]");
  }
  if (s.fft.velocity != s.chirps_per_snapshot) {
    throw ConfigError("SAR velocity FFT size must equal K");
  }
  if (s.fft.range < spec.radar.samples_per_chirp || s.fft.angle < spec.radar.virtual_rx_count()) {
    throw ConfigError("SAR FFT sizes smaller than the data they transform");
  }
  if (!(s.pitch_x_m > 0.0) || !(s.pitch_y_m > 0.0) || !(s.roi_height_m > 0.0) || !(s.roi_angle_rad > 0.0) ||
      s.roi_angle_rad > kPi) {
    throw ConfigError("pixel pitch and ROI size must be positive, ROI angle at most pi");
  }
  if (spec.noise_power < 0.0) throw ConfigError("noise power must be non-negative");
  const double vmax = max_platform_speed(spec.radar, static_cast<double>(s.chirps_per_snapshot) *
                                                         spec.radar.chirp_duration_s,
                                         s.roi_angle_rad);
  const double speed = spec.trajectory.max_speed();
  if (speed > vmax) {
    throw ConstraintViolation("platform speed " + fmt(speed) + " m/s exceeds the admissible " + fmt(vmax) +
                              " m/s for K=" + std::to_string(s.chirps_per_snapshot) + " and an ROI width of " +
                              fmt(rad_to_deg(s.roi_angle_rad)) + " deg");
  }
}

std::vector<IqCube> synthesize_frames(const ScenarioSpec& spec) {
  std::vector<IqCube> frames;
  const std::size_t nf = frames_to_process(spec);
  frames.reserve(nf);
  for (std::size_t p = 0; p < nf; ++p) {
    frames.push_back(synthesize_frame(spec.radar, spec.scene, spec.trajectory, p, spec.noise_power, spec.seed,
                                      spec.delay_model));
  }
  return frames;
}

ScenarioResult process_frames(const ScenarioSpec& spec, const std::vector<IqCube>& frames) {
  check_spec(spec);
  const auto t0 = Clock::now();
  ScenarioResult res;
  const std::size_t nf = frames.size();

  res.detections.reserve(nf);
  for (const auto& cube : frames) {
    res.detections.push_back(detect_frame(cube, spec.radar, spec.detector, &res.detection_flops));
  }
  std::size_t total_detections = 0;
  for (const auto& d : res.detections) total_detections += d.size();

  std::vector<FrameVelocity> velocities;
  std::vector<std::size_t> inlier_counts(nf, 0);
  std::vector<double> residuals(nf, 0.0);
  if (spec.odometry == OdometryMode::estimated && total_detections > 0) {
    RansacParams rp = spec.ransac;
    if (!(rp.inlier_threshold_mps > 0.0)) {
      rp.inlier_threshold_mps = default_inlier_threshold(spec.radar, spec.detector.velocity_points);
    }
    double var_sum = 0.0;
    for (std::size_t p = 0; p < nf; ++p) {
      try {
        const EgoEstimate est = ransac_stationary(observations_from(res.detections[p]), rp);
        velocities.push_back({p, est.velocity});
        inlier_counts[p] = est.inliers.size();
        residuals[p] = est.residual_rms;
        var_sum += est.velocity_std * est.velocity_std;
      } catch (const OdometryError& e) {
        if (!spec.allow_truth_fallback) {
          throw OdometryError("frame " + std::to_string(p) + ": " + e.what());
        }
        velocities.push_back({p, spec.trajectory.velocity(p)});
        res.fallback_frames.push_back(p);
      }
    }
    res.trajectory = integrate_trajectory(velocities);
    res.velocity_error_mps = std::sqrt(var_sum / static_cast<double>(nf));
  } else {
    // Truth mode, or nothing detected: the path does not influence an empty image.
    for (std::size_t p = 0; p < nf; ++p) velocities.push_back({p, spec.trajectory.velocity(p)});
    res.trajectory = integrate_trajectory(velocities);
  }

  for (std::size_t p = 0; p < nf; ++p) {
    const Vec2 start = res.trajectory.position(spec.radar, p, 0);
    res.odometry.push_back({p, res.trajectory.velocity(p), start, inlier_counts[p], residuals[p]});
    add_to_roi(res.roi, res.detections[p], start, spec.sar.roi_height_m, spec.sar.roi_angle_rad);
  }

  res.sar = image_region(frames, res.trajectory, res.roi, spec.radar, spec.sar);
  res.wall_time_s = seconds_since(t0);

  res.admissible_speed_mps = max_platform_speed(
      spec.radar, static_cast<double>(spec.sar.chirps_per_snapshot) * spec.radar.chirp_duration_s,
      spec.sar.roi_angle_rad);
  res.max_speed_mps = spec.trajectory.max_speed();
  if (res.velocity_error_mps > 0.0) res.cpi = cpi_frames(spec.radar, res.velocity_error_mps, kPi / 2.0);
  res.synthetic_aperture_m = res.trajectory.path_length(spec.radar, nf);
  return res;
}

ScenarioResult run_scenario(const ScenarioSpec& spec) {
  check_spec(spec);
  return process_frames(spec, synthesize_frames(spec));
}

std::vector<std::pair<std::string, std::string>> scenario_report(const ScenarioSpec& spec,
                                                                 const ScenarioResult& r, bool deterministic) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::size_t total = 0;
  for (const auto& d : r.detections) total += d.size();
  kv.emplace_back("frames_processed", std::to_string(r.detections.size()));
  kv.emplace_back("detections_total", std::to_string(total));
  kv.emplace_back("odometry_mode", to_string(spec.odometry));
  std::string fb;
  for (std::size_t f : r.fallback_frames) fb += (fb.empty() ? "" : " ") + std::to_string(f);
  kv.emplace_back("odometry_fallback_frames", fb.empty() ? "none" : fb);
  kv.emplace_back("platform_max_speed_mps", fmt(r.max_speed_mps));
  kv.emplace_back("admissible_speed_mps", fmt(r.admissible_speed_mps));
  kv.emplace_back("speed_check", r.max_speed_mps <= r.admissible_speed_mps ? "ok" : "violated");
  kv.emplace_back("velocity_error_estimate_mps", fmt(r.velocity_error_mps));
  if (r.cpi) {
    kv.emplace_back("cpi_frames", fmt(r.cpi->frames));
    kv.emplace_back("cpi_frame_count", std::to_string(r.cpi->frame_count));
    kv.emplace_back("cpi_check", r.detections.size() <= r.cpi->frame_count
                                     ? "ok"
                                     : "warning: frames processed exceed the coherent processing bound");
  } else {
    kv.emplace_back("cpi_frames", "unbounded");
    kv.emplace_back("cpi_check", "ok");
  }
  kv.emplace_back("synthetic_aperture_m", fmt(r.synthetic_aperture_m));
  kv.emplace_back("roi_rectangles", std::to_string(r.roi.rects.size()));
  kv.emplace_back("image_active_pixels", std::to_string(r.sar.image.active_count()));
  kv.emplace_back("image_snapshots", std::to_string(r.sar.image.snapshots));
  kv.emplace_back("image_clipped_lookups", std::to_string(r.sar.image.clipped));
  if (auto pk = find_peak(r.sar.image)) {
    kv.emplace_back("image_peak_x_m", fmt(pk->x_m));
    kv.emplace_back("image_peak_y_m", fmt(pk->y_m));
  }
  append_flops(kv, "flops.detection_stage", r.detection_flops);
  append_flops(kv, "flops.imaging_stage", r.sar.flops);
  kv.emplace_back("flops.mimo_sar_total", std::to_string((r.detection_flops + r.sar.flops).total()));
  if (!deterministic) {
    kv.emplace_back("wall_time_s", fmt(r.wall_time_s));
    kv.emplace_back("wall_time_note", "processing only; synthesis and file I/O excluded");
  }
  return kv;
}

void write_scenario_outputs(const std::filesystem::path& dir, const ScenarioSpec& spec, const ScenarioResult& r,
                            bool deterministic) {
  std::filesystem::create_directories(dir);
  for (std::size_t p = 0; p < r.detections.size(); ++p) {
    char name[64];
    std::snprintf(name, sizeof name, "detections_frame_%03zu.csv", p);
    auto out = open_out(dir / name);
    write_detections_csv(out, p, r.detections[p]);
  }
  {
    auto out = open_out(dir / "odometry.csv");
    write_odometry_csv(out, r.odometry);
  }
  {
    auto out = open_out(dir / "image.pgm", true);
    write_pgm(out, r.sar.image);
  }
  {
    auto out = open_out(dir / "image.csv");
    write_image_csv(out, r.sar.image);
  }
  {
    std::vector<std::pair<std::string, std::string>> kv;
    const auto& c = spec.radar;
    kv.emplace_back("radar.carrier_frequency_hz", fmt(c.carrier_frequency_hz));
    kv.emplace_back("radar.sweep_bandwidth_hz", fmt(c.sweep_bandwidth_hz));
    kv.emplace_back("radar.sweep_slope_hz_per_s", fmt(c.sweep_slope_hz_per_s));
    kv.emplace_back("radar.adc_sampling_rate_sps", fmt(c.adc_sampling_rate_sps));
    kv.emplace_back("radar.samples_per_chirp", std::to_string(c.samples_per_chirp));
    kv.emplace_back("radar.chirps_per_frame", std::to_string(c.chirps_per_frame));
    kv.emplace_back("radar.chirp_duration_s", fmt(c.chirp_duration_s));
    kv.emplace_back("radar.frame_duration_s", fmt(c.frame_duration_s));
    kv.emplace_back("radar.tx_count", std::to_string(c.tx_count));
    kv.emplace_back("radar.rx_count", std::to_string(c.rx_count));
    kv.emplace_back("radar.virtual_rx_spacing_m", fmt(c.virtual_rx_spacing_m));
    kv.emplace_back("sar.chirps_per_snapshot", std::to_string(spec.sar.chirps_per_snapshot));
    kv.emplace_back("sar.pitch_x_m", fmt(spec.sar.pitch_x_m));
    kv.emplace_back("sar.pitch_y_m", fmt(spec.sar.pitch_y_m));
    kv.emplace_back("sar.roi_height_m", fmt(spec.sar.roi_height_m));
    kv.emplace_back("sar.roi_angle_deg", fmt(rad_to_deg(spec.sar.roi_angle_rad)));
    kv.emplace_back("sar.fft_range", std::to_string(spec.sar.fft.range));
    kv.emplace_back("sar.fft_velocity", std::to_string(spec.sar.fft.velocity));
    kv.emplace_back("sar.fft_angle", std::to_string(spec.sar.fft.angle));
    kv.emplace_back("sar.range_window", to_string(spec.sar.range_window));
    kv.emplace_back("detector.range_points", std::to_string(spec.detector.range_points));
    kv.emplace_back("detector.velocity_points", std::to_string(spec.detector.velocity_points));
    kv.emplace_back("detector.angle_points", std::to_string(spec.detector.angle_points));
    kv.emplace_back("detector.cfar_training_cells", std::to_string(spec.detector.cfar.training_cells));
    kv.emplace_back("detector.cfar_guard_cells", std::to_string(spec.detector.cfar.guard_cells));
    kv.emplace_back("detector.cfar_pfa", fmt(spec.detector.cfar.probability_false_alarm));
    kv.emplace_back("odometry.mode", to_string(spec.odometry));
    kv.emplace_back("odometry.ransac_iterations", std::to_string(spec.ransac.iterations));
    kv.emplace_back("noise_power", fmt(spec.noise_power));
    kv.emplace_back("seed", std::to_string(spec.seed));
    kv.emplace_back("image.kx0", std::to_string(r.sar.image.kx0()));
    kv.emplace_back("image.ky0", std::to_string(r.sar.image.ky0()));
    kv.emplace_back("image.nx", std::to_string(r.sar.image.nx()));
    kv.emplace_back("image.ny", std::to_string(r.sar.image.ny()));
    kv.emplace_back("image.active_pixels", std::to_string(r.sar.image.active_count()));
    kv.emplace_back("image.snapshots", std::to_string(r.sar.image.snapshots));
    kv.emplace_back("image.clipped_lookups", std::to_string(r.sar.image.clipped));
    append_flops(kv, "flops.detection_stage", r.detection_flops);
    append_flops(kv, "flops.imaging_stage", r.sar.flops);
    auto out = open_out(dir / "image.meta");
    write_key_values(out, kv);
  }
  {
    auto out = open_out(dir / "report.txt");
    write_key_values(out, scenario_report(spec, r, deterministic));
  }
}

Comparison compare_methods(const ScenarioSpec& spec) {
  check_spec(spec);
  const auto frames = synthesize_frames(spec);
  Comparison cmp;
  const double nf = static_cast<double>(frames.size());

  cmp.mimo_sar = process_frames(spec, frames);
  {
    MethodRow row{"mimo_sar", (cmp.mimo_sar.detection_flops + cmp.mimo_sar.sar.flops).total(), 0.0,
                  cmp.mimo_sar.wall_time_s, 0.0, 0.0};
    row.flops_per_frame = static_cast<double>(row.flops) / nf;
    if (auto pk = find_peak(cmp.mimo_sar.sar.image)) {
      row.peak_x_m = pk->x_m;
      row.peak_y_m = pk->y_m;
    }
    cmp.rows.push_back(row);
  }
  {
    const PlaneExtent e = spec.baseline_plane.value_or(default_plane(spec.scene));
    SarImage plane = make_plane_image(e.x_min, e.x_max, e.y_min, e.y_max, spec.sar.pitch_x_m, spec.sar.pitch_y_m);
    const auto t0 = Clock::now();
    cmp.baseline = baseline_backprojection(frames, spec.trajectory, std::move(plane), spec.radar,
                                           spec.sar.fft.range);
    MethodRow row{"baseline", cmp.baseline.flops.total(), 0.0, seconds_since(t0), 0.0, 0.0};
    row.flops_per_frame = static_cast<double>(row.flops) / nf;
    if (auto pk = find_peak(cmp.baseline.image)) {
      row.peak_x_m = pk->x_m;
      row.peak_y_m = pk->y_m;
    }
    cmp.rows.push_back(row);
  }
  {
    const auto t0 = Clock::now();
    cmp.range_angle = range_angle_image(frames.front(), spec.radar, spec.sar.fft.range, spec.range_angle_points);
    MethodRow row{"range_angle", cmp.range_angle.flops.total(), 0.0, seconds_since(t0), 0.0, 0.0};
    row.flops_per_frame = static_cast<double>(row.flops);
    std::size_t best_r = 0, best_a = 0;
    for (std::size_t a = 0; a < cmp.range_angle.angle_points; ++a) {
      for (std::size_t m = 0; m < cmp.range_angle.range_points; ++m) {
        if (cmp.range_angle.at(m, a) > cmp.range_angle.at(best_r, best_a)) {
          best_r = m;
          best_a = a;
        }
      }
    }
    const double r = range_of_bin(spec.radar, best_r, cmp.range_angle.range_points);
    const double th = angle_of_bin(spec.radar, best_a, cmp.range_angle.angle_points);
    const Vec2 pos = spec.trajectory.position(spec.radar, 0, 0);
    row.peak_x_m = pos.x + r * std::sin(th);
    row.peak_y_m = pos.y + r * std::cos(th);
    cmp.rows.push_back(row);
  }
  return cmp;
}

void write_comparison_csv(std::ostream& out, const Comparison& cmp, bool deterministic) {
  out << "method,flops,flops_per_frame,wall_time_s,peak_x_m,peak_y_m\n";
  char line[256];
  for (const auto& r : cmp.rows) {
    std::snprintf(line, sizeof line, "%s,%llu,%.9g,%.6f,%.6f,%.6f\n", r.method.c_str(),
                  static_cast<unsigned long long>(r.flops), r.flops_per_frame, deterministic ? 0.0 : r.wall_time_s,
                  r.peak_x_m, r.peak_y_m);
    out << line;
  }
}

ScenarioSpec two_target_scenario() {
  ScenarioSpec spec;
  spec.radar = RadarConfig::table1();
  const double a = deg_to_rad(0.5);
  spec.scene.targets = {{{-5.0 * std::sin(a), 5.0 * std::cos(a)}, {1.0, 0.0}},
                        {{5.0 * std::sin(a), 5.0 * std::cos(a)}, {1.0, 0.0}}};
  spec.clusters = {{"left", 1}, {"right", 1}};
  spec.trajectory = Trajectory(std::vector<Vec2>(13, Vec2{1.0, 0.0}));
  spec.frames = 13;
  spec.odometry = OdometryMode::truth;
  spec.baseline_plane = PlaneExtent{-0.5, 0.5, 4.0, 6.0};
  return spec;
}

ScenarioSpec parking_lot_scenario() {
  ScenarioSpec spec;
  spec.radar = RadarConfig::table1();
  auto add = [&](const char* name, std::vector<PointTarget> pts) {
    spec.scene.targets.insert(spec.scene.targets.end(), pts.begin(), pts.end());
    spec.clusters.emplace_back(name, pts.size());
  };
  add("car_left", rectangle_cluster(-5.0, -0.6, 4.0, 5.8, 0.2));
  add("car_right", rectangle_cluster(0.6, 5.0, 4.0, 5.8, 0.2));
  add("truck", rectangle_cluster(-3.0, 3.0, 9.0, 11.5, 0.2));
  spec.trajectory = Trajectory(std::vector<Vec2>(3, Vec2{4.0, 0.0}));
  spec.frames = 3;
  spec.odometry = OdometryMode::estimated;
  spec.delay_model = DelayModel::exact;
  return spec;
}

ScenarioSpec roadside_scenario() {
  ScenarioSpec spec;
  spec.radar = RadarConfig::table1();
  // Barrier along the road with two cars parked parallel behind it.
  for (double x = -6.0; x <= 3.0 + 1e-9; x += 0.2) spec.scene.targets.push_back({{x, 3.0}, {1.0, 0.0}});
  spec.clusters.emplace_back("barrier", spec.scene.targets.size());
  const std::pair<const char*, std::vector<PointTarget>> cars[] = {
      {"car_left", rectangle_cluster(-5.2, -1.0, 3.6, 5.4, 0.2)},
      {"car_right", rectangle_cluster(0.2, 4.4, 3.6, 5.4, 0.2)}};
  for (const auto& [name, car] : cars) {
    spec.scene.targets.insert(spec.scene.targets.end(), car.begin(), car.end());
    spec.clusters.emplace_back(name, car.size());
  }
  // Accelerating platform: v_p = (-6, 1) + (2, -2) * p * T_f.
  std::vector<Vec2> v;
  for (std::size_t p = 0; p < 3; ++p) {
    const double t = static_cast<double>(p) * spec.radar.frame_duration_s;
    v.push_back({-6.0 + 2.0 * t, 1.0 - 2.0 * t});
  }
  spec.trajectory = Trajectory(std::move(v));
  spec.frames = 3;
  spec.odometry = OdometryMode::estimated;
  spec.delay_model = DelayModel::exact;
  return spec;
}

}  // namespace mimosar
