#include "mimosar/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <ostream>
#include <stdexcept>

#include "binary_io.hpp"
#include "mimosar/fft.hpp"

namespace mimosar {

namespace {

bool range_selected(const std::vector<bool>* mask, std::size_t m_r) {
  return mask == nullptr || (m_r < mask->size() && (*mask)[m_r]);
}

std::size_t selected_count(const std::vector<bool>* mask, std::size_t range_points) {
  if (mask == nullptr) return range_points;
  std::size_t c = 0;
  for (std::size_t m = 0; m < range_points; ++m) c += range_selected(mask, m) ? 1 : 0;
  return c;
}

RangeProfiles range_fft_chirps(const IqCube& cube, std::size_t range_points, Window window,
                               std::size_t first_chirp, std::size_t chirp_count, FlopTally* flops) {
  if (range_points < cube.samples()) {
    throw std::invalid_argument("range_fft: FFT points (" + std::to_string(range_points) +
                                ") below samples per chirp (" + std::to_string(cube.samples()) + ")");
  }
  RangeProfiles out;
  out.frame = cube.frame();
  out.bins = ComplexCube(range_points, chirp_count, cube.channels());
  const auto w = window_coefficients(window, cube.samples());
  Fft& fft = fft_plan(range_points);
  std::vector<cplx> in(cube.samples());
  std::vector<cplx> spec(range_points);
  for (std::size_t q = 0; q < cube.channels(); ++q) {
    for (std::size_t n = 0; n < chirp_count; ++n) {
      for (std::size_t i = 0; i < cube.samples(); ++i) in[i] = w[i] * cube.at(i, first_chirp + n, q);
      fft.forward(in, spec);
      for (std::size_t m = 0; m < range_points; ++m) out.bins.at(m, n, q) = spec[m];
    }
  }
  if (flops) {
    const std::uint64_t transforms = static_cast<std::uint64_t>(chirp_count) * cube.channels();
    flops->range_fft += transforms * flop_cost::fft(range_points);
    if (window != Window::rect) flops->range_fft += transforms * 2 * cube.samples();
  }
  return out;
}

}  // namespace

Window parse_window(const std::string& name) {
  if (name == "rect") return Window::rect;
  if (name == "hann") return Window::hann;
  throw ConfigError("unknown window '" + name + "' (expected rect or hann)");
}

std::string to_string(Window w) { return w == Window::hann ? "hann" : "rect"; }

std::vector<double> window_coefficients(Window w, std::size_t length) {
  std::vector<double> c(length, 1.0);
  if (w == Window::hann && length > 1) {
    for (std::size_t i = 0; i < length; ++i) {
      c[i] = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(length - 1));
    }
  }
  return c;
}

RangeProfiles range_fft(const IqCube& cube, std::size_t range_points, Window window, FlopTally* flops) {
  return range_fft_chirps(cube, range_points, window, 0, cube.chirps(), flops);
}

RvMaps velocity_fft(const RangeProfiles& profiles, std::size_t velocity_points, std::size_t first_chirp,
                    std::size_t chirp_count, Window window, FlopTally* flops,
                    const std::vector<bool>* range_mask) {
  if (chirp_count == 0) throw std::invalid_argument("velocity_fft: empty chirp range");
  if (first_chirp + chirp_count > profiles.chirps()) {
    throw std::out_of_range("velocity_fft: chirp range beyond the frame");
  }
  if (velocity_points < chirp_count) {
    throw std::invalid_argument("velocity_fft: FFT points below chirp count");
  }
  RvMaps out;
  out.frame = profiles.frame;
  out.first_chirp = first_chirp;
  out.chirp_count = chirp_count;
  out.bins = ComplexCube(profiles.range_points(), velocity_points, profiles.channels());

  const auto w = window_coefficients(window, chirp_count);
  Fft& fft = fft_plan(velocity_points);
  std::vector<cplx> in(chirp_count);
  std::vector<cplx> spec(velocity_points);
  for (std::size_t q = 0; q < profiles.channels(); ++q) {
    for (std::size_t m = 0; m < profiles.range_points(); ++m) {
      if (!range_selected(range_mask, m)) continue;
      for (std::size_t n = 0; n < chirp_count; ++n) in[n] = w[n] * profiles.bins.at(m, first_chirp + n, q);
      fft.forward_shifted(in, spec);
      for (std::size_t v = 0; v < velocity_points; ++v) out.bins.at(m, v, q) = spec[v];
    }
  }
  if (flops) {
    const std::uint64_t transforms =
        static_cast<std::uint64_t>(selected_count(range_mask, profiles.range_points())) *
        profiles.channels();
    flops->velocity_fft += transforms * flop_cost::fft(velocity_points);
    if (window != Window::rect) flops->velocity_fft += transforms * 2 * chirp_count;
  }
  return out;
}

double doppler_phase_of_bin(std::size_t velocity_bin, std::size_t velocity_points) {
  return kTwoPi * static_cast<double>(centered_bin(velocity_bin, velocity_points)) /
         static_cast<double>(velocity_points);
}

void tdm_compensate(std::span<cplx> channel_values, double doppler_phase, std::size_t tx_count,
                    std::size_t rx_count) {
  if (channel_values.size() != tx_count * rx_count) {
    throw std::invalid_argument("tdm_compensate: channel count does not match tx_count*rx_count");
  }
  for (std::size_t t = 1; t < tx_count; ++t) {
    const cplx rot = std::polar(1.0, -static_cast<double>(t) * doppler_phase / static_cast<double>(tx_count));
    for (std::size_t r = 0; r < rx_count; ++r) channel_values[t * rx_count + r] *= rot;
  }
}

void tdm_compensate(RvMaps& maps, std::size_t tx_count, std::size_t rx_count, FlopTally* flops,
                    const std::vector<bool>* range_mask) {
  if (maps.channels() != tx_count * rx_count) {
    throw std::invalid_argument("tdm_compensate: channel count does not match tx_count*rx_count");
  }
  const std::size_t mv = maps.velocity_points();
  for (std::size_t v = 0; v < mv; ++v) {
    const double dphi = doppler_phase_of_bin(v, mv);
    for (std::size_t t = 1; t < tx_count; ++t) {
      const cplx rot = std::polar(1.0, -static_cast<double>(t) * dphi / static_cast<double>(tx_count));
      for (std::size_t r = 0; r < rx_count; ++r) {
        for (std::size_t m = 0; m < maps.range_points(); ++m) {
          if (range_selected(range_mask, m)) maps.bins.at(m, v, t * rx_count + r) *= rot;
        }
      }
    }
  }
  if (flops) {
    flops->tdm_compensation += static_cast<std::uint64_t>(selected_count(range_mask, maps.range_points())) *
                               mv * (tx_count - 1) * rx_count * flop_cost::kComplexMul;
  }
}

RvaCube angle_fft(const RvMaps& maps, std::size_t angle_points, FlopTally* flops,
                  const std::vector<bool>* range_mask) {
  if (maps.channels() == 0 || maps.channels() > angle_points) {
    throw std::invalid_argument("angle_fft: channel count " + std::to_string(maps.channels()) +
                                " incompatible with " + std::to_string(angle_points) + " FFT points");
  }
  RvaCube out;
  out.frame = maps.frame;
  out.first_chirp = maps.first_chirp;
  out.bins = ComplexCube(maps.range_points(), maps.velocity_points(), angle_points);
  Fft& fft = fft_plan(angle_points);
  std::vector<cplx> in(maps.channels());
  std::vector<cplx> spec(angle_points);
  for (std::size_t v = 0; v < maps.velocity_points(); ++v) {
    for (std::size_t m = 0; m < maps.range_points(); ++m) {
      if (!range_selected(range_mask, m)) continue;
      for (std::size_t q = 0; q < maps.channels(); ++q) in[q] = maps.bins.at(m, v, q);
      fft.forward_shifted(in, spec);
      for (std::size_t a = 0; a < angle_points; ++a) out.bins.at(m, v, a) = spec[a];
    }
  }
  if (flops) {
    flops->angle_fft += static_cast<std::uint64_t>(selected_count(range_mask, maps.range_points())) *
                        maps.velocity_points() * flop_cost::fft(angle_points);
  }
  return out;
}

RvaCube snapshot_rva(const RangeProfiles& profiles, std::size_t snapshot, std::size_t chirps_per_snapshot,
                     const RadarConfig& cfg, const SarFftSizes& sizes, FlopTally* flops,
                     const std::vector<bool>* range_mask) {
  if (chirps_per_snapshot == 0) throw std::invalid_argument("snapshot_rva: K must be positive");
  if (sizes.velocity != chirps_per_snapshot) {
    throw std::invalid_argument("snapshot_rva: velocity FFT points must equal K (no padding)");
  }
  if (profiles.channels() != cfg.virtual_rx_count()) {
    throw std::invalid_argument("snapshot_rva: channel count does not match the radar config");
  }
  const std::size_t first = snapshot * chirps_per_snapshot;
  if (first + chirps_per_snapshot > profiles.chirps()) {
    throw std::out_of_range("snapshot_rva: snapshot extends beyond the frame");
  }
  RvMaps rv = velocity_fft(profiles, sizes.velocity, first, chirps_per_snapshot, Window::rect, flops,
                           range_mask);
  tdm_compensate(rv, cfg.tx_count, cfg.rx_count, flops, range_mask);
  RvaCube out = angle_fft(rv, sizes.angle, flops, range_mask);
  out.t_start_s = static_cast<double>(first) * cfg.chirp_duration_s +
                  static_cast<double>(profiles.frame) * cfg.frame_duration_s;
  return out;
}

RvaCube snapshot_rva(const IqCube& cube, std::size_t snapshot, std::size_t chirps_per_snapshot,
                     const RadarConfig& cfg, const SarFftSizes& sizes, Window window, FlopTally* flops,
                     const std::vector<bool>* range_mask) {
  if (cube.samples() != cfg.samples_per_chirp || cube.chirps() != cfg.chirps_per_frame ||
      cube.channels() != cfg.virtual_rx_count()) {
    throw std::invalid_argument("snapshot_rva: cube dimensions do not match the radar config");
  }
  if (chirps_per_snapshot == 0) throw std::invalid_argument("snapshot_rva: K must be positive");
  if (sizes.velocity != chirps_per_snapshot) {
    throw std::invalid_argument("snapshot_rva: velocity FFT points must equal K (no padding)");
  }
  if (sizes.angle < cube.channels()) {
    throw std::invalid_argument("snapshot_rva: angle FFT points below channel count");
  }
  const std::size_t first = snapshot * chirps_per_snapshot;
  if (first + chirps_per_snapshot > cube.chirps()) {
    throw std::out_of_range("snapshot_rva: snapshot extends beyond the frame");
  }
  // Only the K chirps of this snapshot go through the Range FFT.
  RangeProfiles rp = range_fft_chirps(cube, sizes.range, window, first, chirps_per_snapshot, flops);
  RvMaps rv = velocity_fft(rp, sizes.velocity, 0, chirps_per_snapshot, Window::rect, flops, range_mask);
  rv.first_chirp = first;
  tdm_compensate(rv, cfg.tx_count, cfg.rx_count, flops, range_mask);
  RvaCube out = angle_fft(rv, sizes.angle, flops, range_mask);
  out.first_chirp = first;
  out.t_start_s = static_cast<double>(first) * cfg.chirp_duration_s +
                  static_cast<double>(cube.frame()) * cfg.frame_duration_s;
  return out;
}

void write_rva_cube(std::ostream& out, const RvaCube& cube) {
  char header[128];
  std::snprintf(header, sizeof header, "%zu %zu %zu %.17g\n", cube.range_points(), cube.velocity_points(),
                cube.angle_points(), cube.t_start_s);
  out << header;
  for (const auto& s : cube.bins.data()) {
    detail::put_f64_le(out, s.real());
    detail::put_f64_le(out, s.imag());
  }
}

}  // namespace mimosar
