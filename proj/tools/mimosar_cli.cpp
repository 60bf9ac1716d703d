// mimosar: scenario runner for the ROI-restricted MIMO-SAR pipeline.
//
//   mimosar run --preset two-targets --out out/
//   mimosar run --radar r.cfg --scene s.scene --trajectory t.traj --out out/
//   mimosar compare --preset parking-lot --out out/
//   mimosar make-scene --rect -5 -0.6 4 5.8 --spacing 0.2 --out car.scene
//   mimosar check-constraints --speed 4 --sigma 0.005
//
// Exit status: 0 ok, 2 configuration error, 3 odometry failure,
// 4 constraint violation, 1 anything else.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mimosar/pipeline.hpp"

namespace fs = std::filesystem;
using namespace mimosar;

namespace {

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kOdometry = 3, kConstraint = 4 };

struct ScenarioFlags {
  std::string preset;
  std::string radar_path;
  std::string scene_path;
  std::string trajectory_path;
  std::optional<std::size_t> frames;
  std::optional<std::size_t> k;
  std::optional<double> pitch_x, pitch_y, roi_height, roi_angle_deg;
  std::optional<std::size_t> fft_range, fft_angle;
  std::optional<std::string> window;
  std::optional<std::string> odometry;
  bool allow_fallback = false;
  std::optional<std::size_t> ransac_iterations;
  std::optional<double> ransac_threshold;
  std::optional<double> noise_power;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> delay_model;
  std::optional<std::size_t> ra_points;
  std::vector<double> plane;
  std::string out_dir;
  bool deterministic = false;
};

void add_scenario_flags(CLI::App* app, ScenarioFlags& f) {
  app->add_option("--preset", f.preset, "Built-in scenario")
      ->check(CLI::IsMember({"two-targets", "parking-lot", "roadside"}));
  app->add_option("--radar", f.radar_path, "Radar configuration file (default: 77 GHz reference radar)");
  app->add_option("--scene", f.scene_path, "Scene file");
  app->add_option("--trajectory", f.trajectory_path, "True trajectory file");
  app->add_option("--frames", f.frames, "Frames to process (default: all)");
  app->add_option("--chirps-per-snapshot,-K", f.k, "Snapshot length K");
  app->add_option("--pitch-x", f.pitch_x, "Pixel pitch along x [m]");
  app->add_option("--pitch-y", f.pitch_y, "Pixel pitch along y [m]");
  app->add_option("--roi-height", f.roi_height, "ROI rectangle height [m]");
  app->add_option("--roi-angle-deg", f.roi_angle_deg, "ROI angular width [deg]");
  app->add_option("--sar-range-fft", f.fft_range, "SAR range FFT points");
  app->add_option("--sar-angle-fft", f.fft_angle, "SAR angle FFT points");
  app->add_option("--range-window", f.window, "rect or hann");
  app->add_option("--odometry", f.odometry, "truth or estimated");
  app->add_flag("--allow-truth-fallback", f.allow_fallback, "Use the true velocity when odometry fails");
  app->add_option("--ransac-iterations", f.ransac_iterations, "RANSAC hypotheses");
  app->add_option("--ransac-threshold", f.ransac_threshold, "RANSAC inlier threshold [m/s]");
  app->add_option("--noise-power", f.noise_power, "Per-sample complex noise variance");
  app->add_option("--seed", f.seed, "Noise seed");
  app->add_option("--delay-model", f.delay_model, "linearized or exact");
  app->add_option("--ra-angle-points", f.ra_points, "Angle FFT points of the range-angle map");
  app->add_option("--plane", f.plane, "Baseline image plane: x_min x_max y_min y_max")->expected(4);
  app->add_option("--out", f.out_dir, "Output directory")->required();
  app->add_flag("--deterministic", f.deterministic, "Byte-reproducible outputs (wall times omitted)");
}

ScenarioSpec build_spec(const ScenarioFlags& f) {
  ScenarioSpec spec;
  if (!f.preset.empty()) {
    if (f.preset == "two-targets") spec = two_target_scenario();
    else if (f.preset == "parking-lot") spec = parking_lot_scenario();
    else spec = roadside_scenario();
    if (!f.radar_path.empty()) spec.radar = load_radar_config(f.radar_path);
    if (!f.scene_path.empty()) spec.scene = load_scene(f.scene_path);
    if (!f.trajectory_path.empty()) spec.trajectory = load_trajectory(f.trajectory_path);
  } else {
    if (f.scene_path.empty() || f.trajectory_path.empty())
      throw ConfigError("either --preset or both --scene and --trajectory are required");
    spec.radar = f.radar_path.empty() ? RadarConfig::table1() : load_radar_config(f.radar_path);
    spec.scene = load_scene(f.scene_path);
    spec.trajectory = load_trajectory(f.trajectory_path);
  }
  if (f.frames) spec.frames = *f.frames;
  if (f.k) {
    spec.sar.chirps_per_snapshot = *f.k;
    spec.sar.fft.velocity = *f.k;
  }
  if (f.pitch_x) spec.sar.pitch_x_m = *f.pitch_x;
  if (f.pitch_y) spec.sar.pitch_y_m = *f.pitch_y;
  if (f.roi_height) spec.sar.roi_height_m = *f.roi_height;
  if (f.roi_angle_deg) spec.sar.roi_angle_rad = deg_to_rad(*f.roi_angle_deg);
  if (f.fft_range) spec.sar.fft.range = *f.fft_range;
  if (f.fft_angle) spec.sar.fft.angle = *f.fft_angle;
  if (f.window) spec.sar.range_window = parse_window(*f.window);
  if (f.odometry) spec.odometry = parse_odometry_mode(*f.odometry);
  spec.allow_truth_fallback = f.allow_fallback;
  if (f.ransac_iterations) spec.ransac.iterations = *f.ransac_iterations;
  if (f.ransac_threshold) spec.ransac.inlier_threshold_mps = *f.ransac_threshold;
  if (f.noise_power) spec.noise_power = *f.noise_power;
  if (f.seed) spec.seed = *f.seed;
  if (f.delay_model) spec.delay_model = parse_delay_model(*f.delay_model);
  if (f.ra_points) spec.range_angle_points = *f.ra_points;
  if (f.plane.size() == 4) spec.baseline_plane = PlaneExtent{f.plane[0], f.plane[1], f.plane[2], f.plane[3]};
  return spec;
}

int cmd_run(const ScenarioFlags& f) {
  const ScenarioSpec spec = build_spec(f);
  const ScenarioResult r = run_scenario(spec);
  write_scenario_outputs(f.out_dir, spec, r, f.deterministic);
  write_key_values(std::cout, scenario_report(spec, r, f.deterministic));
  return kOk;
}

int cmd_compare(const ScenarioFlags& f) {
  const ScenarioSpec spec = build_spec(f);
  const Comparison cmp = compare_methods(spec);
  write_scenario_outputs(f.out_dir, spec, cmp.mimo_sar, f.deterministic);
  {
    std::ofstream pgm(fs::path(f.out_dir) / "baseline.pgm", std::ios::binary);
    write_pgm(pgm, cmp.baseline.image);
    std::ofstream csv(fs::path(f.out_dir) / "comparison.csv");
    write_comparison_csv(csv, cmp, f.deterministic);
    if (!pgm || !csv) throw std::runtime_error("cannot write to " + f.out_dir);
  }
  write_comparison_csv(std::cout, cmp, f.deterministic);
  const double base = static_cast<double>(cmp.rows[1].flops_per_frame);
  const double roi = static_cast<double>(cmp.rows[0].flops_per_frame);
  std::printf("baseline/mimo_sar flops per frame: %.2f\n", roi > 0.0 ? base / roi : 0.0);
  return kOk;
}

struct SceneFlags {
  std::string preset;
  std::vector<std::vector<double>> rects;
  std::vector<std::vector<double>> points;
  double spacing = 0.2;
  std::string out;
  std::string trajectory_out;
  std::string radar_out;
  std::vector<double> velocity;
  std::size_t frames = 1;
};

int cmd_make_scene(const SceneFlags& f) {
  if (f.spacing <= 0.0) throw ConfigError("--spacing must be positive");
  Scene scene;
  std::optional<Trajectory> traj;
  if (!f.preset.empty()) {
    const ScenarioSpec spec = f.preset == "two-targets"   ? two_target_scenario()
                              : f.preset == "parking-lot" ? parking_lot_scenario()
                                                          : roadside_scenario();
    scene = spec.scene;
    traj = spec.trajectory;
  }
  for (const auto& r : f.rects) {
    if (r[0] > r[1] || r[2] > r[3]) throw ConfigError("--rect expects x_min x_max y_min y_max");
    const auto pts = rectangle_cluster(r[0], r[1], r[2], r[3], f.spacing);
    scene.targets.insert(scene.targets.end(), pts.begin(), pts.end());
  }
  for (const auto& p : f.points) scene.targets.push_back({{p[0], p[1]}, {1.0, 0.0}});
  if (f.velocity.size() == 2) traj = Trajectory(std::vector<Vec2>(f.frames, Vec2{f.velocity[0], f.velocity[1]}));

  std::ofstream out(f.out);
  write_scene(out, scene);
  if (!out) throw std::runtime_error("cannot write " + f.out);
  if (!f.trajectory_out.empty()) {
    if (!traj) throw ConfigError("--trajectory-out needs --preset or --velocity");
    std::ofstream t(f.trajectory_out);
    write_trajectory(t, *traj);
    if (!t) throw std::runtime_error("cannot write " + f.trajectory_out);
  }
  if (!f.radar_out.empty()) {
    std::ofstream r(f.radar_out);
    write_radar_config(r, RadarConfig::table1());
    if (!r) throw std::runtime_error("cannot write " + f.radar_out);
  }
  std::printf("targets=%zu\n", scene.targets.size());
  return kOk;
}

struct ConstraintFlags {
  std::string radar_path;
  std::size_t k = 20;
  double roi_angle_deg = 5.0;
  std::optional<double> speed;
  std::optional<double> sigma;
  double phase_threshold = kPi / 2.0;
};

int cmd_check(const ConstraintFlags& f) {
  const RadarConfig cfg = f.radar_path.empty() ? RadarConfig::table1() : load_radar_config(f.radar_path);
  if (f.k == 0) throw ConfigError("-K must be positive");
  const DerivedLimits lim = derive_limits(cfg);
  const double interval = static_cast<double>(f.k) * cfg.chirp_duration_s;
  const double vmax_roi = max_platform_speed(cfg, interval, deg_to_rad(f.roi_angle_deg));
  const double vmax_full = max_platform_speed(cfg, interval, kPi);
  std::printf("range_resolution_m=%.6g\n", lim.range_resolution_m);
  std::printf("velocity_resolution_mps=%.6g\n", lim.velocity_resolution_mps);
  std::printf("angle_resolution_deg=%.6g\n", rad_to_deg(lim.angle_resolution_rad));
  std::printf("max_range_m=%.6g\n", lim.max_range_m);
  std::printf("max_velocity_mps=%.6g\n", lim.max_velocity_mps);
  std::printf("max_angle_deg=%.6g\n", rad_to_deg(lim.max_angle_rad));
  std::printf("snapshot_rate_hz=%.6g\n", 1.0 / interval);
  std::printf("admissible_speed_full_scope_mps=%.6g\n", vmax_full);
  std::printf("admissible_speed_roi_mps=%.6g\n", vmax_roi);
  if (f.sigma) {
    const CpiEstimate cpi = cpi_frames(cfg, *f.sigma, f.phase_threshold);
    std::printf("cpi_frames=%.6g\ncpi_frame_count=%zu\n", cpi.frames, cpi.frame_count);
  }
  if (f.speed) {
    const bool ok = *f.speed <= vmax_roi;
    std::printf("speed_check=%s\n", ok ? "ok" : "violated");
    if (!ok) {
      std::fprintf(stderr, "error: speed %.6g m/s exceeds the admissible %.6g m/s\n", *f.speed, vmax_roi);
      return kConstraint;
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ROI-restricted MIMO-SAR imaging for a moving FMCW radar"};
  app.require_subcommand(1);

  ScenarioFlags run_flags, cmp_flags;
  auto* run = app.add_subcommand("run", "Synthesize, detect, estimate odometry and image a scenario");
  add_scenario_flags(run, run_flags);
  auto* cmp = app.add_subcommand("compare", "Compare MIMO-SAR, baseline backprojection and range-angle imaging");
  add_scenario_flags(cmp, cmp_flags);

  SceneFlags scene_flags;
  auto* mk = app.add_subcommand("make-scene", "Write a point-cluster scene file");
  mk->add_option("--preset", scene_flags.preset, "Built-in scene")
      ->check(CLI::IsMember({"two-targets", "parking-lot", "roadside"}));
  mk->add_option("--rect", scene_flags.rects, "Rectangle outline: x_min x_max y_min y_max")->expected(1, 100);
  mk->add_option("--point", scene_flags.points, "Single point: x y")->expected(1, 1000);
  mk->add_option("--spacing", scene_flags.spacing, "Outline point spacing [m]");
  mk->add_option("--out", scene_flags.out, "Scene file")->required();
  mk->add_option("--trajectory-out", scene_flags.trajectory_out, "Also write a trajectory file");
  mk->add_option("--radar-out", scene_flags.radar_out, "Also write the default radar configuration");
  mk->add_option("--velocity", scene_flags.velocity, "Constant velocity vx vy")->expected(2);
  mk->add_option("--frames", scene_flags.frames, "Frames of the constant-velocity trajectory");
  // Each --rect / --point occurrence is one vector of 4 / 2 numbers.
  mk->get_option("--rect")->type_size(4)->allow_extra_args(false);
  mk->get_option("--point")->type_size(2)->allow_extra_args(false);

  ConstraintFlags cc;
  auto* chk = app.add_subcommand("check-constraints", "Print derived limits, admissible speed and CPI bound");
  chk->add_option("--radar", cc.radar_path, "Radar configuration file");
  chk->add_option("--chirps-per-snapshot,-K", cc.k, "Snapshot length K");
  chk->add_option("--roi-angle-deg", cc.roi_angle_deg, "ROI angular width [deg]");
  chk->add_option("--speed", cc.speed, "Platform speed to check [m/s]");
  chk->add_option("--sigma", cc.sigma, "Per-frame velocity error rms [m/s]");
  chk->add_option("--phase-threshold", cc.phase_threshold, "CPI phase threshold [rad]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*run) return cmd_run(run_flags);
    if (*cmp) return cmd_compare(cmp_flags);
    if (*mk) return cmd_make_scene(scene_flags);
    if (*chk) return cmd_check(cc);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const OdometryError& e) {
    std::fprintf(stderr, "odometry failure: %s\n", e.what());
    return kOdometry;
  } catch (const ConstraintViolation& e) {
    std::fprintf(stderr, "constraint violation: %s\n", e.what());
    return kConstraint;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kOther;
  }
  return kOk;
}
