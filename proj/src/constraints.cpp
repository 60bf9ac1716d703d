#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "mimosar/radar_config.hpp"

namespace mimosar {

namespace {

// Published waveform tables round the slope (21 MHz/us x 16 us = 336 MHz
// against a 335 MHz sweep), so the sweep check allows this much slack.
constexpr double kSweepSlack = 5e-3;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text, const std::string& where) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(where + ": value of '" + key + "' is not a number: '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(value)) {
    throw ConfigError(where + ": value of '" + key + "' is not a finite number: '" + text + "'");
  }
  return value;
}

std::size_t parse_count(const std::string& key, const std::string& text, const std::string& where) {
  const double v = parse_double(key, text, where);
  if (v < 0 || v != std::floor(v)) {
    throw ConfigError(where + ": value of '" + key + "' must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

void RadarConfig::validate() const {
  const std::pair<const char*, double> positive[] = {
      {"carrier_frequency_hz", carrier_frequency_hz},
      {"sweep_bandwidth_hz", sweep_bandwidth_hz},
      {"sweep_slope_hz_per_s", sweep_slope_hz_per_s},
      {"adc_sampling_rate_sps", adc_sampling_rate_sps},
      {"samples_per_chirp", static_cast<double>(samples_per_chirp)},
      {"chirps_per_frame", static_cast<double>(chirps_per_frame)},
      {"chirp_duration_s", chirp_duration_s},
      {"frame_duration_s", frame_duration_s},
      {"tx_count", static_cast<double>(tx_count)},
      {"rx_count", static_cast<double>(rx_count)},
      {"virtual_rx_spacing_m", virtual_rx_spacing_m},
      {"tx_amplitude", tx_amplitude},
      {"rx_amplitude", rx_amplitude},
  };
  for (const auto& [name, value] : positive) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw ConfigError(std::string("radar config: ") + name + " must be positive");
    }
  }
  if (!std::isfinite(initial_phase_rad)) {
    throw ConfigError("radar config: initial_phase_rad must be finite");
  }
  if (adc_window_s() > chirp_duration_s) {
    throw ConfigError("radar config: ADC window samples_per_chirp/adc_sampling_rate_sps exceeds chirp_duration_s");
  }
  if (sweep_slope_hz_per_s * adc_window_s() > sweep_bandwidth_hz * (1.0 + kSweepSlack)) {
    throw ConfigError("radar config: sampled sweep sweep_slope*adc_window exceeds sweep_bandwidth_hz");
  }
  if (static_cast<double>(chirps_per_frame) * chirp_duration_s > frame_duration_s) {
    throw ConfigError("radar config: chirps_per_frame*chirp_duration_s exceeds frame_duration_s");
  }
}

RadarConfig RadarConfig::table1() { return RadarConfig{}; }

DerivedLimits derive_limits(const RadarConfig& cfg) {
  cfg.validate();
  const double lambda = cfg.wavelength_m();
  const double h = cfg.virtual_rx_spacing_m;
  DerivedLimits d{};
  d.range_resolution_m = kSpeedOfLight / (2.0 * cfg.sweep_bandwidth_hz);
  d.velocity_resolution_mps =
      lambda / (2.0 * static_cast<double>(cfg.chirps_per_frame) * cfg.chirp_duration_s);
  d.angle_resolution_rad = lambda / (static_cast<double>(cfg.virtual_rx_count()) * h);
  d.max_range_m = cfg.adc_sampling_rate_sps * kSpeedOfLight / (2.0 * cfg.sweep_slope_hz_per_s);
  d.max_velocity_mps = lambda / (4.0 * cfg.chirp_duration_s);
  // h = lambda/2 lands on exactly 1 up to rounding.
  d.max_angle_rad = std::asin(std::min(1.0, lambda / (2.0 * h)));
  return d;
}

double max_platform_speed(const RadarConfig& cfg, double snapshot_interval_s,
                          double azimuth_scope_rad) {
  if (!(snapshot_interval_s > 0.0)) {
    throw std::invalid_argument("max_platform_speed: snapshot interval must be positive");
  }
  if (!(azimuth_scope_rad > 0.0) || azimuth_scope_rad > kPi) {
    throw std::invalid_argument("max_platform_speed: azimuth scope must lie in (0, pi]");
  }
  const double prf = 1.0 / snapshot_interval_s;
  return cfg.wavelength_m() / (2.0 * std::sin(azimuth_scope_rad / 2.0)) * prf;
}

double expected_distance_error(const RadarConfig& cfg, double velocity_error_rms_mps,
                               std::size_t frames) {
  return std::sqrt(2.0 * static_cast<double>(frames) / kPi) * velocity_error_rms_mps *
         cfg.frame_duration_s;
}

CpiEstimate cpi_frames(const RadarConfig& cfg, double velocity_error_rms_mps,
                       double phase_threshold_rad) {
  if (!(velocity_error_rms_mps > 0.0) || !(phase_threshold_rad > 0.0)) {
    throw std::invalid_argument("cpi_frames: sigma and phase threshold must be positive");
  }
  const double ratio = kSpeedOfLight * phase_threshold_rad /
                       (4.0 * cfg.carrier_frequency_hz * velocity_error_rms_mps * cfg.frame_duration_s);
  CpiEstimate est{};
  est.frames = ratio * ratio / kTwoPi;
  est.frame_count = static_cast<std::size_t>(std::ceil(est.frames));
  return est;
}

RadarConfig parse_radar_config(std::istream& in, const std::string& source) {
  RadarConfig cfg;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto real = [&](double RadarConfig::*field) -> Setter {
    return [&cfg, field, &source](const std::string& k, const std::string& v) {
      cfg.*field = parse_double(k, v, source);
    };
  };
  auto count = [&](std::size_t RadarConfig::*field) -> Setter {
    return [&cfg, field, &source](const std::string& k, const std::string& v) {
      cfg.*field = parse_count(k, v, source);
    };
  };
  const std::map<std::string, Setter> setters = {
      {"carrier_frequency_hz", real(&RadarConfig::carrier_frequency_hz)},
      {"sweep_bandwidth_hz", real(&RadarConfig::sweep_bandwidth_hz)},
      {"sweep_slope_hz_per_s", real(&RadarConfig::sweep_slope_hz_per_s)},
      {"adc_sampling_rate_sps", real(&RadarConfig::adc_sampling_rate_sps)},
      {"samples_per_chirp", count(&RadarConfig::samples_per_chirp)},
      {"chirps_per_frame", count(&RadarConfig::chirps_per_frame)},
      {"chirp_duration_s", real(&RadarConfig::chirp_duration_s)},
      {"frame_duration_s", real(&RadarConfig::frame_duration_s)},
      {"tx_count", count(&RadarConfig::tx_count)},
      {"rx_count", count(&RadarConfig::rx_count)},
      {"virtual_rx_spacing_m", real(&RadarConfig::virtual_rx_spacing_m)},
      {"initial_phase_rad", real(&RadarConfig::initial_phase_rad)},
      {"tx_amplitude", real(&RadarConfig::tx_amplitude)},
      {"rx_amplitude", real(&RadarConfig::rx_amplitude)},
  };

  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno);
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(where + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + ": duplicate key '" + key + "'");
    it->second(key, value);
  }
  cfg.validate();
  return cfg;
}

RadarConfig load_radar_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open radar config '" + path.string() + "'");
  return parse_radar_config(in, path.string());
}

void write_radar_config(std::ostream& out, const RadarConfig& cfg) {
  std::ostringstream s;
  s << std::setprecision(17);
  s << "carrier_frequency_hz = " << cfg.carrier_frequency_hz << '\n'
    << "sweep_bandwidth_hz = " << cfg.sweep_bandwidth_hz << '\n'
    << "sweep_slope_hz_per_s = " << cfg.sweep_slope_hz_per_s << '\n'
    << "adc_sampling_rate_sps = " << cfg.adc_sampling_rate_sps << '\n'
    << "samples_per_chirp = " << cfg.samples_per_chirp << '\n'
    << "chirps_per_frame = " << cfg.chirps_per_frame << '\n'
    << "chirp_duration_s = " << cfg.chirp_duration_s << '\n'
    << "frame_duration_s = " << cfg.frame_duration_s << '\n'
    << "tx_count = " << cfg.tx_count << '\n'
    << "rx_count = " << cfg.rx_count << '\n'
    << "virtual_rx_spacing_m = " << cfg.virtual_rx_spacing_m << '\n'
    << "initial_phase_rad = " << cfg.initial_phase_rad << '\n'
    << "tx_amplitude = " << cfg.tx_amplitude << '\n'
    << "rx_amplitude = " << cfg.rx_amplitude << '\n';
  out << s.str();
}

}  // namespace mimosar
