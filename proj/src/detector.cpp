#include "mimosar/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "mimosar/fft.hpp"

namespace mimosar {

double cfar_alpha(std::size_t training_count, double probability_false_alarm) {
  if (training_count == 0) throw std::invalid_argument("cfar_alpha: no training cells");
  if (!(probability_false_alarm > 0.0 && probability_false_alarm < 1.0)) {
    throw std::invalid_argument("cfar_alpha: P_fa must lie in (0, 1)");
  }
  const double n = static_cast<double>(training_count);
  return n * (std::pow(probability_false_alarm, -1.0 / n) - 1.0);
}

PowerMap integrate_noncoherent(const RvMaps& maps, FlopTally* flops) {
  if (maps.channels() == 0) throw std::invalid_argument("integrate_noncoherent: no channels");
  PowerMap out(maps.range_points(), maps.velocity_points());
  for (std::size_t q = 0; q < maps.channels(); ++q) {
    for (std::size_t v = 0; v < maps.velocity_points(); ++v) {
      for (std::size_t m = 0; m < maps.range_points(); ++m) out.at(m, v) += std::abs(maps.bins.at(m, v, q));
    }
  }
  if (flops) {
    flops->detection += static_cast<std::uint64_t>(maps.range_points()) * maps.velocity_points() *
                        maps.channels() * (flop_cost::kMagnitude + 1);
  }
  return out;
}

PowerMap squared(const PowerMap& map) {
  PowerMap out = map;
  for (auto& x : out.data()) x *= x;
  return out;
}

std::vector<Cell> cfar_2d(const PowerMap& map, const CfarParams& params, FlopTally* flops) {
  const std::size_t t = params.training_cells;
  const std::size_t g = params.guard_cells;
  if (t == 0) throw std::invalid_argument("cfar_2d: training_cells must be positive");
  const std::size_t span = 2 * (t + g) + 1;
  if (map.range_points() < span || map.velocity_points() < span) {
    throw std::invalid_argument("cfar_2d: window of " + std::to_string(span) + " cells exceeds map " +
                                std::to_string(map.range_points()) + "x" +
                                std::to_string(map.velocity_points()));
  }
  // Alpha depends only on the available training count, at most 4t.
  std::vector<double> alpha(4 * t + 1, 0.0);
  for (std::size_t n = 1; n <= 4 * t; ++n) alpha[n] = cfar_alpha(n, params.probability_false_alarm);

  const long nr = static_cast<long>(map.range_points());
  const long nv = static_cast<long>(map.velocity_points());
  const long lo = static_cast<long>(g) + 1;
  const long hi = static_cast<long>(g + t);
  std::vector<Cell> hits;
  std::uint64_t ops = 0;
  for (long v = 0; v < nv; ++v) {
    for (long r = 0; r < nr; ++r) {
      double sum = 0.0;
      std::size_t count = 0;
      for (long d = lo; d <= hi; ++d) {
        if (r - d >= 0) { sum += map.at(r - d, v); ++count; }
        if (r + d < nr) { sum += map.at(r + d, v); ++count; }
        if (v - d >= 0) { sum += map.at(r, v - d); ++count; }
        if (v + d < nv) { sum += map.at(r, v + d); ++count; }
      }
      ops += count + 3;
      const double cut = map.at(r, v);
      if (count > 0 && cut > alpha[count] * sum / static_cast<double>(count)) {
        hits.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(v), cut});
      }
    }
  }
  if (flops) flops->detection += ops;
  return hits;
}

std::vector<Cell> peak_group(const std::vector<Cell>& hits, const PowerMap& map, FlopTally* flops) {
  const long nr = static_cast<long>(map.range_points());
  const long nv = static_cast<long>(map.velocity_points());
  std::vector<Cell> kept;
  for (const Cell& c : hits) {
    if (c.m_r >= map.range_points() || c.m_v >= map.velocity_points()) {
      throw std::out_of_range("peak_group: detection outside the map");
    }
    const long r = static_cast<long>(c.m_r);
    const long v = static_cast<long>(c.m_v);
    const double p = map.at(c.m_r, c.m_v);
    bool peak = true;
    for (long dr = -1; dr <= 1 && peak; ++dr) {
      for (long dv = -1; dv <= 1 && peak; ++dv) {
        if (dr == 0 && dv == 0) continue;
        const long rr = r + dr;
        const long vv = v + dv;
        if (rr < 0 || rr >= nr || vv < 0 || vv >= nv) continue;
        const double q = map.at(rr, vv);
        // On a tie the cell with the lower (m_r, m_v) index survives.
        if (q > p || (q == p && (rr < r || (rr == r && vv < v)))) peak = false;
      }
    }
    if (peak) kept.push_back({c.m_r, c.m_v, p});
  }
  if (flops) flops->detection += hits.size() * 8;
  return kept;
}

double range_of_bin(const RadarConfig& cfg, std::size_t m_r, std::size_t range_points) {
  return static_cast<double>(m_r) * cfg.adc_sampling_rate_sps * kSpeedOfLight /
         (2.0 * cfg.sweep_slope_hz_per_s * static_cast<double>(range_points));
}

double velocity_of_bin(const RadarConfig& cfg, std::size_t m_v, std::size_t velocity_points) {
  return static_cast<double>(centered_bin(m_v, velocity_points)) * cfg.wavelength_m() /
         (2.0 * static_cast<double>(velocity_points) * cfg.chirp_duration_s);
}

double angle_of_bin(const RadarConfig& cfg, std::size_t m_theta, std::size_t angle_points) {
  const double s = static_cast<double>(centered_bin(m_theta, angle_points)) * cfg.wavelength_m() /
                   (cfg.virtual_rx_spacing_m * static_cast<double>(angle_points));
  return std::asin(std::clamp(s, -1.0, 1.0));
}

std::vector<Detection> estimate_angles(const std::vector<Cell>& hits, const RvMaps& maps,
                                       const RadarConfig& cfg, std::size_t angle_points,
                                       FlopTally* flops) {
  const std::size_t nq = maps.channels();
  if (nq != cfg.virtual_rx_count()) {
    throw std::invalid_argument("estimate_angles: channel count does not match the radar config");
  }
  if (nq == 0 || nq > angle_points) {
    throw std::invalid_argument("estimate_angles: angle FFT shorter than the virtual array");
  }
  Fft& fft = fft_plan(angle_points);
  std::vector<cplx> chan(nq);
  std::vector<cplx> spec(angle_points);
  std::vector<Detection> out;
  out.reserve(hits.size());
  for (const Cell& c : hits) {
    for (std::size_t q = 0; q < nq; ++q) chan[q] = maps.bins.at(c.m_r, c.m_v, q);
    tdm_compensate(chan, doppler_phase_of_bin(c.m_v, maps.velocity_points()), cfg.tx_count, cfg.rx_count);
    fft.forward_shifted(chan, spec);
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t a = 0; a < angle_points; ++a) {
      const double m = std::norm(spec[a]);
      if (m > best_mag) { best_mag = m; best = a; }
    }
    Detection d;
    d.m_r = c.m_r;
    d.m_v = c.m_v;
    d.m_theta = best;
    d.amplitude = c.power;
    d.range_m = range_of_bin(cfg, c.m_r, maps.range_points());
    d.radial_velocity_mps = velocity_of_bin(cfg, c.m_v, maps.velocity_points());
    d.azimuth_rad = angle_of_bin(cfg, best, angle_points);
    out.push_back(d);
  }
  if (flops) {
    const std::uint64_t per = (cfg.tx_count - 1) * cfg.rx_count * flop_cost::kComplexMul +
                              flop_cost::fft(angle_points) +
                              angle_points * (flop_cost::kMagnitudeSquared + 1);
    flops->detection += hits.size() * per;
  }
  return out;
}

std::vector<Detection> detect_frame(const IqCube& cube, const RadarConfig& cfg, const DetectorParams& params,
                                    FlopTally* flops) {
  if (cube.channels() != cfg.virtual_rx_count() || cube.samples() != cfg.samples_per_chirp) {
    throw std::invalid_argument("detect_frame: cube dimensions do not match the radar config");
  }
  FlopTally local;
  const RangeProfiles rp = range_fft(cube, params.range_points, params.range_window, &local);
  const RvMaps rv = velocity_fft(rp, params.velocity_points, 0, cube.chirps(), params.velocity_window, &local);
  const PowerMap power = squared(integrate_noncoherent(rv, &local));
  local.detection += power.data().size();
  const auto hits = cfar_2d(power, params.cfar, &local);
  const auto peaks = peak_group(hits, power, &local);
  auto dets = estimate_angles(peaks, rv, cfg, params.angle_points, &local);
  if (flops) *flops += local;
  return dets;
}

void write_detections_csv(std::ostream& out, std::size_t frame, const std::vector<Detection>& dets,
                          bool header) {
  if (header) out << "frame,r_m,v_r_mps,theta_rad,amplitude,m_r,m_v,m_theta\n";
  char line[256];
  for (const auto& d : dets) {
    std::snprintf(line, sizeof line, "%zu,%.9g,%.9g,%.9g,%.9g,%zu,%zu,%zu\n", frame, d.range_m,
                  d.radial_velocity_mps, d.azimuth_rad, d.amplitude, d.m_r, d.m_v, d.m_theta);
    out << line;
  }
}

}  // namespace mimosar
