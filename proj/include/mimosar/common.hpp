#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mimosar {

using cplx = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Bad or inconsistent configuration (radar file, scenario flags, scene file).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A design constraint (e.g. the azimuth sampling bound) is violated.
class ConstraintViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ego-motion could not be estimated (degenerate geometry, no consensus).
class OdometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mimosar
