#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "mimosar/common.hpp"
#include "mimosar/radar_config.hpp"

namespace mimosar {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
  double norm() const;
};

/// Stationary point scatterer in the global plane.
struct PointTarget {
  Vec2 position_m;
  cplx reflectivity{1.0, 0.0};
};

struct Scene {
  std::vector<PointTarget> targets;
};

/// Piecewise-constant platform velocity, one entry per frame, starting at
/// the origin. Chirp n of frame p is transmitted at p*T_f + n*T_c.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<Vec2> frame_velocities_mps);

  std::size_t frame_count() const { return velocities_.size(); }
  const std::vector<Vec2>& velocities() const { return velocities_; }
  Vec2 velocity(std::size_t frame) const;

  /// Platform position at the start of chirp `chirp` of frame `frame`.
  /// Throws std::out_of_range for frame >= frame_count() or chirp beyond
  /// the frame.
  Vec2 position(const RadarConfig& cfg, std::size_t frame, std::size_t chirp) const;

  /// Largest per-frame speed.
  double max_speed() const;

  /// Path length over the first `frames` frames.
  double path_length(const RadarConfig& cfg, std::size_t frames) const;

 private:
  std::vector<Vec2> velocities_;
};

Vec2 position_at(const Trajectory& traj, const RadarConfig& cfg, std::size_t frame, std::size_t chirp);

/// Rectangle outline sampled every `spacing_m` (corners included), the way
/// extended vehicles and barriers are represented as point clusters.
std::vector<PointTarget> rectangle_cluster(double x_min, double x_max, double y_min, double y_max,
                                           double spacing_m, cplx reflectivity = {1.0, 0.0});

// Scene file: one target per line `x_m y_m [reflect_re reflect_im]`.
// Trajectory file: one line per frame `vx_mps vy_mps`. '#' starts a comment.
Scene parse_scene(std::istream& in, const std::string& source = "<stream>");
Scene load_scene(const std::filesystem::path& path);
void write_scene(std::ostream& out, const Scene& scene);

Trajectory parse_trajectory(std::istream& in, const std::string& source = "<stream>");
Trajectory load_trajectory(const std::filesystem::path& path);
void write_trajectory(std::ostream& out, const Trajectory& traj);

}  // namespace mimosar
