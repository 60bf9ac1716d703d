#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mimosar/detector.hpp"
#include "mimosar/odometry.hpp"
#include "mimosar/radar_config.hpp"
#include "mimosar/sar.hpp"
#include "mimosar/scene.hpp"
#include "mimosar/synth.hpp"

namespace mimosar {

enum class OdometryMode { truth, estimated };

OdometryMode parse_odometry_mode(const std::string& name);
std::string to_string(OdometryMode mode);

struct PlaneExtent {
  double x_min, x_max, y_min, y_max;
};

struct ScenarioSpec {
  RadarConfig radar;
  Scene scene;
  Trajectory trajectory;  // ground truth, used for synthesis
  std::size_t frames = 0;  // 0: every frame of the trajectory
  SarParams sar;
  DetectorParams detector;
  OdometryMode odometry = OdometryMode::truth;
  bool allow_truth_fallback = false;
  RansacParams ransac;  // threshold <= 0 picks three velocity bins
  double noise_power = kDefaultNoisePower;
  std::uint64_t seed = 1;
  DelayModel delay_model = DelayModel::linearized;
  std::size_t range_angle_points = 16;
  std::optional<PlaneExtent> baseline_plane;  // default: scene extent plus 1 m
  // Named groups of consecutive scene targets (name, count), e.g. one per
  // vehicle. Informational; empty for scenes loaded from files.
  std::vector<std::pair<std::string, std::size_t>> clusters;
};

/// Reads the radar, scene and trajectory files into a spec with default
/// processing parameters.
ScenarioSpec load_scenario(const std::filesystem::path& radar_path, const std::filesystem::path& scene_path,
                           const std::filesystem::path& trajectory_path);

struct ScenarioResult {
  std::vector<std::vector<Detection>> detections;  // per frame
  std::vector<OdometryRow> odometry;
  Trajectory trajectory;  // the one used for imaging
  std::vector<std::size_t> fallback_frames;  // frames that fell back to truth
  Roi roi;
  SarRun sar;
  FlopTally detection_flops;
  double admissible_speed_mps = 0.0;
  double max_speed_mps = 0.0;
  double velocity_error_mps = 0.0;  // rms of per-frame velocity std; 0 in truth mode
  std::optional<CpiEstimate> cpi;
  double synthetic_aperture_m = 0.0;
  double wall_time_s = 0.0;  // processing only, excluding synthesis and file I/O
};

/// Number of frames a spec processes after defaulting.
std::size_t frames_to_process(const ScenarioSpec& spec);

/// Throws ConstraintViolation when the trajectory is faster than the
/// snapshot rate admits for the ROI angular width, ConfigError for
/// inconsistent parameters.
void check_spec(const ScenarioSpec& spec);

/// Synthesis of every processed frame.
std::vector<IqCube> synthesize_frames(const ScenarioSpec& spec);

/// Detection, odometry, ROI construction and ROI imaging on the given
/// frames. Throws OdometryError in estimated mode when a frame cannot be
/// solved and fallback is not allowed.
ScenarioResult process_frames(const ScenarioSpec& spec, const std::vector<IqCube>& frames);

ScenarioResult run_scenario(const ScenarioSpec& spec);

/// Summary lines (key=value) including the speed check and the CPI bound.
std::vector<std::pair<std::string, std::string>> scenario_report(const ScenarioSpec& spec,
                                                                 const ScenarioResult& result,
                                                                 bool deterministic);

/// Writes detections_frame_NNN.csv, odometry.csv, image.pgm, image.csv,
/// image.meta and report.txt under `dir`.
void write_scenario_outputs(const std::filesystem::path& dir, const ScenarioSpec& spec,
                            const ScenarioResult& result, bool deterministic);

struct MethodRow {
  std::string method;
  std::uint64_t flops = 0;
  double flops_per_frame = 0.0;
  double wall_time_s = 0.0;
  double peak_x_m = 0.0;
  double peak_y_m = 0.0;
};

struct Comparison {
  std::vector<MethodRow> rows;  // mimo_sar, baseline, range_angle
  ScenarioResult mimo_sar;
  SarRun baseline;
  RangeAngleImage range_angle;
};

/// Runs MIMO-SAR, full-plane backprojection and single-frame range-angle
/// imaging on the same synthesized frames.
Comparison compare_methods(const ScenarioSpec& spec);

// CSV `method,flops,flops_per_frame,wall_time_s,peak_x_m,peak_y_m`; wall
// times are written as 0 in deterministic mode.
void write_comparison_csv(std::ostream& out, const Comparison& cmp, bool deterministic);

// Built-in scenes.
ScenarioSpec two_target_scenario();
ScenarioSpec parking_lot_scenario();
ScenarioSpec roadside_scenario();

}  // namespace mimosar
