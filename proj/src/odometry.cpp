#include "mimosar/odometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

namespace mimosar {

namespace {

constexpr double kDegenerateSpread = 1e-6;

double model_residual(const RadialObservation& o, Vec2 v) {
  return o.radial_velocity_mps + (std::sin(o.azimuth_rad) * v.x + std::cos(o.azimuth_rad) * v.y);
}

// Exact solve through two observations; false when their azimuths coincide.
bool solve_pair(const RadialObservation& a, const RadialObservation& b, Vec2& v) {
  if (std::abs(a.azimuth_rad - b.azimuth_rad) < kDegenerateSpread) return false;
  const double a11 = -std::sin(a.azimuth_rad), a12 = -std::cos(a.azimuth_rad);
  const double a21 = -std::sin(b.azimuth_rad), a22 = -std::cos(b.azimuth_rad);
  const double det = a11 * a22 - a12 * a21;
  if (std::abs(det) < 1e-12) return false;
  v.x = (a22 * a.radial_velocity_mps - a12 * b.radial_velocity_mps) / det;
  v.y = (a11 * b.radial_velocity_mps - a21 * a.radial_velocity_mps) / det;
  return true;
}

}  // namespace

std::vector<RadialObservation> observations_from(const std::vector<Detection>& dets) {
  std::vector<RadialObservation> obs;
  obs.reserve(dets.size());
  for (const auto& d : dets) obs.push_back({d.azimuth_rad, d.radial_velocity_mps});
  return obs;
}

VelocityFit solve_velocity(const std::vector<RadialObservation>& obs) {
  if (obs.size() < 2) {
    throw OdometryError("velocity solve needs at least 2 detections, got " + std::to_string(obs.size()));
  }
  const auto [lo, hi] = std::minmax_element(obs.begin(), obs.end(), [](const auto& a, const auto& b) {
    return a.azimuth_rad < b.azimuth_rad;
  });
  if (hi->azimuth_rad - lo->azimuth_rad < kDegenerateSpread) {
    throw OdometryError("velocity solve: degenerate geometry (all detections at the same azimuth)");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(obs.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = -std::sin(obs[i].azimuth_rad);
    a(i, 1) = -std::cos(obs[i].azimuth_rad);
    b(i) = obs[i].radial_velocity_mps;
  }
  const Eigen::Vector2d x = a.colPivHouseholderQr().solve(b);

  VelocityFit fit;
  fit.velocity = {x(0), x(1)};
  fit.residuals.resize(obs.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    fit.residuals[i] = model_residual(obs[i], fit.velocity);
    ss += fit.residuals[i] * fit.residuals[i];
  }
  fit.residual_rms = std::sqrt(ss / static_cast<double>(obs.size()));
  if (obs.size() > 2) {
    const double s2 = ss / static_cast<double>(obs.size() - 2);
    const Eigen::Matrix2d cov = s2 * (a.transpose() * a).inverse();
    fit.velocity_std = std::sqrt(std::max(0.0, cov.trace()) / 2.0);
  }
  return fit;
}

double default_inlier_threshold(const RadarConfig& cfg, std::size_t velocity_points) {
  return 3.0 * cfg.wavelength_m() / (2.0 * static_cast<double>(velocity_points) * cfg.chirp_duration_s);
}

EgoEstimate ransac_stationary(const std::vector<RadialObservation>& obs, const RansacParams& params) {
  const std::size_t n = obs.size();
  if (n < 2) throw OdometryError("RANSAC needs at least 2 detections, got " + std::to_string(n));
  if (!(params.inlier_threshold_mps > 0.0)) {
    throw std::invalid_argument("ransac_stationary: inlier threshold must be positive");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (obs[i].azimuth_rad != obs[j].azimuth_rad) return obs[i].azimuth_rad < obs[j].azimuth_rad;
    return obs[i].radial_velocity_mps < obs[j].radial_velocity_mps;
  });

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  const std::size_t total_pairs = n * (n - 1) / 2;
  if (total_pairs <= params.iterations) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    }
  } else {
    std::mt19937_64 rng(params.seed);
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    std::uniform_int_distribution<std::size_t> second(0, n - 2);
    for (std::size_t it = 0; it < params.iterations; ++it) {
      const std::size_t i = first(rng);
      std::size_t j = second(rng);
      if (j >= i) ++j;
      pairs.emplace_back(i, j);
    }
  }

  std::vector<std::size_t> best;  // positions in sorted order
  std::vector<std::size_t> current;
  for (const auto& [i, j] : pairs) {
    Vec2 v;
    if (!solve_pair(obs[order[i]], obs[order[j]], v)) continue;
    if (v.norm() > params.max_speed_mps) continue;
    current.clear();
    for (std::size_t k = 0; k < n; ++k) {
      if (std::abs(model_residual(obs[order[k]], v)) < params.inlier_threshold_mps) current.push_back(k);
    }
    if (current.size() > best.size()) best = current;
  }
  if (best.size() < 2) throw OdometryError("RANSAC found no consensus set of 2 or more detections");

  std::vector<RadialObservation> consensus;
  EgoEstimate est;
  for (std::size_t k : best) {
    consensus.push_back(obs[order[k]]);
    est.inliers.push_back(order[k]);
  }
  std::sort(est.inliers.begin(), est.inliers.end());
  const VelocityFit fit = solve_velocity(consensus);
  est.velocity = fit.velocity;
  est.residual_rms = fit.residual_rms;
  est.velocity_std = fit.velocity_std;
  return est;
}

Trajectory integrate_trajectory(const std::vector<FrameVelocity>& frames) {
  if (frames.empty()) throw std::invalid_argument("integrate_trajectory: no frames");
  std::vector<Vec2> v;
  v.reserve(frames.size());
  for (std::size_t k = 0; k < frames.size(); ++k) {
    if (frames[k].frame != k) {
      throw std::invalid_argument("integrate_trajectory: expected frame " + std::to_string(k) + ", got " +
                                  std::to_string(frames[k].frame));
    }
    v.push_back(frames[k].velocity);
  }
  return Trajectory(std::move(v));
}

void write_odometry_csv(std::ostream& out, const std::vector<OdometryRow>& rows) {
  out << "frame,vx_hat,vy_hat,x_start,y_start,n_inliers,residual_rms\n";
  char line[256];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%zu,%.9g,%.9g,%.9g,%.9g,%zu,%.9g\n", r.frame, r.velocity.x,
                  r.velocity.y, r.start.x, r.start.y, r.inliers, r.residual_rms);
    out << line;
  }
}

}  // namespace mimosar
