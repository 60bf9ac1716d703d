#include "mimosar/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace mimosar {

namespace {

// Splits a data line into numbers; returns false for blank/comment lines.
bool read_numbers(const std::string& raw, std::vector<double>& out, const std::string& where) {
  out.clear();
  const std::string line = raw.substr(0, raw.find('#'));
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw ConfigError(where + ": not a number: '" + tok + "'");
    }
    if (used != tok.size() || !std::isfinite(v)) {
      throw ConfigError(where + ": not a finite number: '" + tok + "'");
    }
    out.push_back(v);
  }
  return !out.empty();
}

}  // namespace

double Vec2::norm() const { return std::hypot(x, y); }

Trajectory::Trajectory(std::vector<Vec2> frame_velocities_mps)
    : velocities_(std::move(frame_velocities_mps)) {}

Vec2 Trajectory::velocity(std::size_t frame) const {
  if (frame >= velocities_.size()) throw std::out_of_range("trajectory: frame index out of range");
  return velocities_[frame];
}

Vec2 Trajectory::position(const RadarConfig& cfg, std::size_t frame, std::size_t chirp) const {
  if (frame >= velocities_.size()) {
    throw std::out_of_range("trajectory: frame " + std::to_string(frame) + " beyond " +
                            std::to_string(velocities_.size()) + " frames");
  }
  if (chirp > cfg.chirps_per_frame) {
    throw std::out_of_range("trajectory: chirp index beyond frame");
  }
  Vec2 p;
  for (std::size_t u = 0; u < frame; ++u) p = p + cfg.frame_duration_s * velocities_[u];
  return p + (static_cast<double>(chirp) * cfg.chirp_duration_s) * velocities_[frame];
}

double Trajectory::max_speed() const {
  double m = 0.0;
  for (const auto& v : velocities_) m = std::max(m, v.norm());
  return m;
}

double Trajectory::path_length(const RadarConfig& cfg, std::size_t frames) const {
  double len = 0.0;
  for (std::size_t p = 0; p < std::min(frames, velocities_.size()); ++p) {
    len += velocities_[p].norm() * cfg.frame_duration_s;
  }
  return len;
}

Vec2 position_at(const Trajectory& traj, const RadarConfig& cfg, std::size_t frame, std::size_t chirp) {
  return traj.position(cfg, frame, chirp);
}

std::vector<PointTarget> rectangle_cluster(double x_min, double x_max, double y_min, double y_max,
                                           double spacing_m, cplx reflectivity) {
  if (!(spacing_m > 0.0) || !(x_max >= x_min) || !(y_max >= y_min)) {
    throw std::invalid_argument("rectangle_cluster: need x_min <= x_max, y_min <= y_max, spacing > 0");
  }
  std::vector<PointTarget> pts;
  auto edge = [&](Vec2 a, Vec2 b) {
    // Samples [a, b): the next edge contributes b.
    const double len = (b - a).norm();
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / spacing_m - 1e-9)));
    for (std::size_t i = 0; i < n; ++i) {
      const double f = static_cast<double>(i) / static_cast<double>(n);
      pts.push_back({a + f * (b - a), reflectivity});
    }
  };
  const Vec2 c0{x_min, y_min}, c1{x_max, y_min}, c2{x_max, y_max}, c3{x_min, y_max};
  if (x_max == x_min && y_max == y_min) return {{c0, reflectivity}};
  edge(c0, c1);
  edge(c1, c2);
  edge(c2, c3);
  edge(c3, c0);
  return pts;
}

Scene parse_scene(std::istream& in, const std::string& source) {
  Scene scene;
  std::string line;
  std::vector<double> v;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno);
    if (!read_numbers(line, v, where)) continue;
    if (v.size() != 2 && v.size() != 4) {
      throw ConfigError(where + ": expected 'x y' or 'x y re im'");
    }
    PointTarget t{{v[0], v[1]}, v.size() == 4 ? cplx{v[2], v[3]} : cplx{1.0, 0.0}};
    if (!(std::abs(t.reflectivity) > 0.0)) throw ConfigError(where + ": reflectivity must be nonzero");
    scene.targets.push_back(t);
  }
  return scene;
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scene file '" + path.string() + "'");
  return parse_scene(in, path.string());
}

void write_scene(std::ostream& out, const Scene& scene) {
  std::ostringstream s;
  s << std::setprecision(12);
  for (const auto& t : scene.targets) {
    s << t.position_m.x << ' ' << t.position_m.y << ' ' << t.reflectivity.real() << ' '
      << t.reflectivity.imag() << '\n';
  }
  out << s.str();
}

Trajectory parse_trajectory(std::istream& in, const std::string& source) {
  std::vector<Vec2> vel;
  std::string line;
  std::vector<double> v;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno);
    if (!read_numbers(line, v, where)) continue;
    if (v.size() != 2) throw ConfigError(where + ": expected 'vx vy'");
    vel.push_back({v[0], v[1]});
  }
  return Trajectory(std::move(vel));
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trajectory file '" + path.string() + "'");
  return parse_trajectory(in, path.string());
}

void write_trajectory(std::ostream& out, const Trajectory& traj) {
  std::ostringstream s;
  s << std::setprecision(17);
  for (const auto& v : traj.velocities()) s << v.x << ' ' << v.y << '\n';
  out << s.str();
}

}  // namespace mimosar
