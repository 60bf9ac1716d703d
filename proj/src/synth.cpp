#include "mimosar/synth.hpp"

#include "binary_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>
#include <string>

namespace mimosar {

namespace {

constexpr double kMinRange = 1e-9;

}  // namespace

IqCube::IqCube(std::size_t samples, std::size_t chirps, std::size_t channels, std::size_t frame)
    : samples_(samples),
      chirps_(chirps),
      channels_(channels),
      frame_(frame),
      data_(samples * chirps * channels, cplx{0.0, 0.0}) {}

double range_rate(Vec2 radar, Vec2 velocity, Vec2 target) {
  const Vec2 rel = target - radar;
  const double r = rel.norm();
  if (r < kMinRange) throw std::invalid_argument("range_rate: target at zero range");
  return -(velocity.x * rel.x + velocity.y * rel.y) / r;
}

DelayModel parse_delay_model(const std::string& name) {
  if (name == "linearized") return DelayModel::linearized;
  if (name == "exact") return DelayModel::exact;
  throw ConfigError("unknown delay model '" + name + "' (expected linearized or exact)");
}

std::string to_string(DelayModel model) { return model == DelayModel::exact ? "exact" : "linearized"; }

IqCube synthesize_frame(const RadarConfig& cfg, const Scene& scene, const Trajectory& traj,
                        std::size_t frame, double noise_power, std::uint64_t rng_seed,
                        DelayModel delay_model) {
  cfg.validate();
  if (scene.targets.empty() && !(noise_power > 0.0)) {
    throw std::invalid_argument("synthesize_frame: empty scene needs positive noise power");
  }
  if (noise_power < 0.0) throw std::invalid_argument("synthesize_frame: negative noise power");

  const std::size_t ns = cfg.samples_per_chirp;
  const std::size_t nc = cfg.chirps_per_frame;
  const std::size_t nq = cfg.virtual_rx_count();
  IqCube cube(ns, nc, nq, frame);
  cube.set_noise_power(noise_power);

  const double fc = cfg.carrier_frequency_hz;
  const double slope = cfg.sweep_slope_hz_per_s;
  const double fs = cfg.adc_sampling_rate_sps;
  const double tc = cfg.chirp_duration_s;
  const double lambda = cfg.wavelength_m();
  const double h = cfg.virtual_rx_spacing_m;
  const double amp = cfg.tx_amplitude * cfg.rx_amplitude / 2.0;

  const Vec2 radar0 = traj.position(cfg, frame, 0);
  const Vec2 vel = traj.velocity(frame);

  for (const auto& tgt : scene.targets) {
    const Vec2 rel0 = tgt.position_m - radar0;
    const double r0 = rel0.norm();
    if (r0 < kMinRange) {
      throw std::invalid_argument("synthesize_frame: target at zero range from the radar");
    }
    const double vr0 = range_rate(radar0, vel, tgt.position_m);
    const double tau0 = 2.0 * r0 / kSpeedOfLight;
    const cplx a = amp * tgt.reflectivity;

    for (std::size_t n = 0; n < nc; ++n) {
      const double tn = static_cast<double>(n) * tc;
      const Vec2 rel = tgt.position_m - (radar0 + tn * vel);
      const double rn = rel.norm();
      if (rn < kMinRange) throw std::invalid_argument("synthesize_frame: target at zero range");
      const bool exact = delay_model == DelayModel::exact;
      const double vr = exact ? -(vel.x * rel.x + vel.y * rel.y) / rn : vr0;
      const double tau = exact ? 2.0 * rn / kSpeedOfLight : tau0 + 2.0 * vr0 * tn / kSpeedOfLight;
      // Chirp-to-chirp Doppler phase in cycles; TDM slot t lags by t/N_Tx of it.
      const double doppler_cycles = 2.0 * vr * tc / lambda;
      const double sin_theta = rel.x / rn;
      const double base_cycles = fc * tau - 0.5 * slope * tau * tau;
      const double beat_cycles_per_sample = slope * tau / fs;
      for (std::size_t q = 0; q < nq; ++q) {
        const std::size_t tx = q / cfg.rx_count;
        const double chan_cycles = static_cast<double>(q) * h * sin_theta / lambda +
                                   static_cast<double>(tx) * doppler_cycles /
                                       static_cast<double>(cfg.tx_count);
        const double start = base_cycles + chan_cycles;
        for (std::size_t i = 0; i < ns; ++i) {
          const double cycles = start + beat_cycles_per_sample * static_cast<double>(i);
          // Keep the argument small before scaling by 2*pi.
          const double frac = cycles - std::floor(cycles);
          cube.at(i, n, q) += a * std::polar(1.0, kTwoPi * frac);
        }
      }
    }
  }

  if (noise_power > 0.0) {
    std::seed_seq seq{static_cast<std::uint32_t>(rng_seed & 0xffffffffu),
                      static_cast<std::uint32_t>(rng_seed >> 32),
                      static_cast<std::uint32_t>(frame & 0xffffffffu),
                      static_cast<std::uint32_t>(static_cast<std::uint64_t>(frame) >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> gauss(0.0, std::sqrt(noise_power / 2.0));
    for (auto& s : cube.data()) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      s += cplx{re, im};
    }
  }
  return cube;
}

void write_iq_cube(std::ostream& out, const IqCube& cube) {
  out << cube.samples() << ' ' << cube.chirps() << ' ' << cube.channels() << ' ' << cube.frame()
      << '\n';
  for (const auto& s : cube.data()) {
    detail::put_f64_le(out, s.real());
    detail::put_f64_le(out, s.imag());
  }
}

IqCube read_iq_cube(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("iq cube: missing header");
  std::size_t ns = 0, nc = 0, nq = 0, frame = 0;
  if (std::sscanf(header.c_str(), "%zu %zu %zu %zu", &ns, &nc, &nq, &frame) != 4) {
    throw std::runtime_error("iq cube: malformed header '" + header + "'");
  }
  IqCube cube(ns, nc, nq, frame);
  for (auto& s : cube.data()) {
    const double re = detail::get_f64_le(in);
    const double im = detail::get_f64_le(in);
    s = {re, im};
  }
  return cube;
}

}  // namespace mimosar
