#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "mimosar/detector.hpp"
#include "mimosar/radar_config.hpp"
#include "mimosar/scene.hpp"

namespace mimosar {

/// Radial velocity of one detection and the direction it was seen in.
struct RadialObservation {
  double azimuth_rad = 0.0;
  double radial_velocity_mps = 0.0;

  friend bool operator==(const RadialObservation&, const RadialObservation&) = default;
};

std::vector<RadialObservation> observations_from(const std::vector<Detection>& dets);

/// Least-squares platform velocity from stationary-target observations
/// v_r = -(sin(theta) v_x + cos(theta) v_y).
struct VelocityFit {
  Vec2 velocity;
  std::vector<double> residuals;  // v_r - model, in input order
  double residual_rms = 0.0;
  double velocity_std = 0.0;      // sqrt(trace(cov) / 2), zero with two observations
};

/// Throws OdometryError for fewer than two observations or when all
/// azimuths agree within 1e-6 rad.
VelocityFit solve_velocity(const std::vector<RadialObservation>& obs);

struct RansacParams {
  std::size_t iterations = 100;
  double inlier_threshold_mps = 0.0;  // <= 0 means 3 velocity bins of the radar
  std::uint64_t seed = 0;
  double max_speed_mps = std::numeric_limits<double>::infinity();
};

/// Velocity estimate of one frame after outlier rejection.
struct EgoEstimate {
  Vec2 velocity;
  std::vector<std::size_t> inliers;  // indices into the input, ascending
  double residual_rms = 0.0;
  double velocity_std = 0.0;
};

/// Two-point RANSAC over the observations followed by a least-squares refit
/// on the largest consensus set (ties go to the earliest hypothesis). The
/// observations are sorted before sampling so the result does not depend on
/// input order. When the number of distinct pairs does not exceed the
/// iteration budget every pair is tried once. Throws OdometryError when no
/// hypothesis gathers two inliers.
EgoEstimate ransac_stationary(const std::vector<RadialObservation>& obs, const RansacParams& params);

/// Default inlier threshold: three velocity bins of a 256-point Doppler FFT
/// unless `velocity_points` says otherwise.
double default_inlier_threshold(const RadarConfig& cfg, std::size_t velocity_points = 256);

struct FrameVelocity {
  std::size_t frame = 0;
  Vec2 velocity;
};

/// Builds the piecewise-linear platform path from per-frame velocities.
/// Frames must be 0, 1, 2, ... in order; throws std::invalid_argument on a
/// gap or when the list is empty.
Trajectory integrate_trajectory(const std::vector<FrameVelocity>& frames);

struct OdometryRow {
  std::size_t frame = 0;
  Vec2 velocity;
  Vec2 start;  // platform position at the first chirp of the frame
  std::size_t inliers = 0;
  double residual_rms = 0.0;
};

// CSV rows `frame,vx_hat,vy_hat,x_start,y_start,n_inliers,residual_rms`.
void write_odometry_csv(std::ostream& out, const std::vector<OdometryRow>& rows);

}  // namespace mimosar
