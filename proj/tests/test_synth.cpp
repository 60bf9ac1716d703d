#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mimosar/synth.hpp"

using namespace mimosar;

namespace {

double wrap(double a) { return std::remainder(a, kTwoPi); }

Scene one_target(double x, double y) {
  Scene s;
  s.targets.push_back({{x, y}, {1.0, 0.0}});
  return s;
}

TEST(Synthesis, StationaryPhaseDifferences) {
  const RadarConfig cfg = RadarConfig::table1();
  const Vec2 tgt{1.2, 4.0};
  const IqCube c = synthesize_frame(cfg, one_target(tgt.x, tgt.y), Trajectory({{0.0, 0.0}}), 0, 0.0, 1);
  const double r = tgt.norm();
  const double tau = 2 * r / kSpeedOfLight;
  const double sin_t = tgt.x / r;

  const double beat = kTwoPi * cfg.sweep_slope_hz_per_s * tau / cfg.adc_sampling_rate_sps;
  const double spatial = kTwoPi * cfg.virtual_rx_spacing_m * sin_t / cfg.wavelength_m();
  for (std::size_t q = 0; q + 1 < 8; ++q) {
    EXPECT_NEAR(wrap(std::arg(c.at(5, 3, q + 1) / c.at(5, 3, q)) - spatial), 0.0, 1e-9) << q;
  }
  for (std::size_t i = 0; i + 1 < 64; i += 7) {
    EXPECT_NEAR(wrap(std::arg(c.at(i + 1, 0, 2) / c.at(i, 0, 2)) - beat), 0.0, 1e-9);
  }
  // Without motion every chirp repeats.
  EXPECT_NEAR(std::abs(c.at(9, 200, 6) - c.at(9, 0, 6)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(c.at(0, 0, 0)), cfg.tx_amplitude * cfg.rx_amplitude / 2.0, 1e-12);
}

TEST(Synthesis, MirrorTargetConjugatesChannelPhase) {
  const RadarConfig cfg = RadarConfig::table1();
  const Trajectory still({{0.0, 0.0}});
  const IqCube a = synthesize_frame(cfg, one_target(0.8, 5.0), still, 0, 0.0, 1);
  const IqCube b = synthesize_frame(cfg, one_target(-0.8, 5.0), still, 0, 0.0, 1);
  for (std::size_t q = 0; q < 8; ++q) {
    const cplx ra = a.at(0, 0, q) / a.at(0, 0, 0);
    const cplx rb = b.at(0, 0, q) / b.at(0, 0, 0);
    EXPECT_NEAR(std::abs(ra - std::conj(rb)), 0.0, 1e-9) << q;
  }
}

TEST(Synthesis, MovingPlatformDopplerAndTdmSlot) {
  const RadarConfig cfg = RadarConfig::table1();
  const Vec2 tgt{2.0, 5.0};
  const Vec2 v{1.0, 0.0};
  const IqCube c = synthesize_frame(cfg, one_target(tgt.x, tgt.y), Trajectory({v}), 0, 0.0, 1);
  const double vr = -(v.x * tgt.x + v.y * tgt.y) / tgt.norm();
  const double dphi = kTwoPi * 2 * vr * cfg.chirp_duration_s / cfg.wavelength_m();
  // Chirp to chirp (same channel): the Doppler phase, up to a ~1e-5 relative
  // chirp-slope correction.
  EXPECT_NEAR(wrap(std::arg(c.at(0, 1, 0) / c.at(0, 0, 0)) - dphi), 0.0, 1e-3);
  // Tx1.Rx0 vs Tx0.Rx3: one array step plus half the Doppler phase.
  const double sin_t = tgt.x / tgt.norm();
  const double spatial = kTwoPi * cfg.virtual_rx_spacing_m * sin_t / cfg.wavelength_m();
  EXPECT_NEAR(wrap(std::arg(c.at(0, 0, 4) / c.at(0, 0, 3)) - spatial - dphi / 2), 0.0, 1e-6);
  EXPECT_NEAR(wrap(std::arg(c.at(0, 0, 3) / c.at(0, 0, 2)) - spatial), 0.0, 1e-6);
}

TEST(Synthesis, RangeRateSign) {
  // Moving towards +x with the target ahead on +x: closing, negative.
  EXPECT_LT(range_rate({0, 0}, {1, 0}, {3, 1}), 0.0);
  EXPECT_GT(range_rate({0, 0}, {-1, 0}, {3, 1}), 0.0);
  EXPECT_NEAR(range_rate({0, 0}, {1, 0}, {0, 5}), 0.0, 1e-15);
  EXPECT_NEAR(range_rate({0, 0}, {0, 2}, {0, 5}), -2.0, 1e-15);
}

TEST(Synthesis, LinearInScene) {
  const RadarConfig cfg = RadarConfig::table1();
  const Trajectory traj({{1.0, 0.2}, {1.0, 0.2}});
  Scene a = one_target(0.5, 4.0), b = one_target(-1.0, 6.0);
  b.targets[0].reflectivity = {0.3, -0.7};
  Scene ab = a;
  ab.targets.push_back(b.targets[0]);
  for (auto model : {DelayModel::linearized, DelayModel::exact}) {
    const IqCube ca = synthesize_frame(cfg, a, traj, 1, 0.0, 1, model);
    const IqCube cb = synthesize_frame(cfg, b, traj, 1, 0.0, 1, model);
    const IqCube cab = synthesize_frame(cfg, ab, traj, 1, 0.0, 1, model);
    double err = 0.0;
    for (std::size_t k = 0; k < cab.data().size(); ++k)
      err = std::max(err, std::abs(cab.data()[k] - ca.data()[k] - cb.data()[k]));
    EXPECT_LT(err, 1e-12);
  }
}

TEST(Synthesis, ReflectivityScales) {
  const RadarConfig cfg = RadarConfig::table1();
  Scene s = one_target(0.5, 4.0);
  const IqCube one = synthesize_frame(cfg, s, Trajectory({{1, 0}}), 0, 0.0, 1);
  s.targets[0].reflectivity = {0.0, 2.0};
  const IqCube two = synthesize_frame(cfg, s, Trajectory({{1, 0}}), 0, 0.0, 1);
  for (std::size_t k = 0; k < one.data().size(); k += 97)
    EXPECT_NEAR(std::abs(two.data()[k] - cplx{0, 2} * one.data()[k]), 0.0, 1e-12);
}

TEST(Synthesis, SeedDeterminism) {
  const RadarConfig cfg = RadarConfig::table1();
  const Scene s = one_target(0.5, 4.0);
  const Trajectory traj({{1, 0}, {1, 0}});
  const IqCube a = synthesize_frame(cfg, s, traj, 0, 0.1, 42);
  const IqCube b = synthesize_frame(cfg, s, traj, 0, 0.1, 42);
  const IqCube c = synthesize_frame(cfg, s, traj, 0, 0.1, 43);
  const IqCube d = synthesize_frame(cfg, s, traj, 1, 0.1, 42);
  EXPECT_EQ(a.data(), b.data());
  EXPECT_NE(a.data(), c.data());
  EXPECT_NE(a.data()[0] - synthesize_frame(cfg, s, traj, 0, 0.0, 42).data()[0],
            d.data()[0] - synthesize_frame(cfg, s, traj, 1, 0.0, 42).data()[0]);
}

TEST(Synthesis, NoiseVariance) {
  const RadarConfig cfg = RadarConfig::table1();
  Scene empty;
  const IqCube c = synthesize_frame(cfg, empty, Trajectory({{0, 0}}), 0, 0.5, 7);
  double p = 0.0;
  cplx mean{0, 0};
  for (const auto& s : c.data()) {
    p += std::norm(s);
    mean += s;
  }
  const double n = static_cast<double>(c.data().size());
  EXPECT_NEAR(p / n, 0.5, 0.02);
  EXPECT_NEAR(std::abs(mean / n), 0.0, 0.01);
  EXPECT_THROW(synthesize_frame(cfg, empty, Trajectory({{0, 0}}), 0, 0.0, 7), std::invalid_argument);
}

TEST(Synthesis, ExactAndLinearizedAgreeAtFrameStart) {
  const RadarConfig cfg = RadarConfig::table1();
  const Scene s = one_target(-2.0, 5.0);
  const Trajectory traj({{4, 0}});
  const IqCube lin = synthesize_frame(cfg, s, traj, 0, 0.0, 1, DelayModel::linearized);
  const IqCube ex = synthesize_frame(cfg, s, traj, 0, 0.0, 1, DelayModel::exact);
  for (std::size_t q = 0; q < 8; ++q) EXPECT_NEAR(std::abs(lin.at(3, 0, q) - ex.at(3, 0, q)), 0.0, 1e-12);
  // The dropped quadratic term v^2 t^2 sin^2 / r grows to radians by the
  // last chirp: 4 * pi / lambda * (v t cos(theta))^2 / (2 r).
  const double t = 254 * cfg.chirp_duration_s, r = std::hypot(2.0, 5.0);
  const double cos_t = 5.0 / r;
  const double expect = 4 * kPi / cfg.wavelength_m() * std::pow(4 * t * cos_t, 2) / (2 * r);
  const double got = std::abs(wrap(std::arg(ex.at(0, 254, 0) / lin.at(0, 254, 0))));
  EXPECT_NEAR(got, std::abs(wrap(expect)), 0.05);
}

TEST(IqCubeFile, RoundTrip) {
  const RadarConfig cfg = RadarConfig::table1();
  const IqCube c = synthesize_frame(cfg, one_target(0.5, 4.0), Trajectory({{1, 0}}), 0, 0.01, 3);
  std::stringstream ss;
  write_iq_cube(ss, c);
  const IqCube back = read_iq_cube(ss);
  EXPECT_EQ(back.samples(), c.samples());
  EXPECT_EQ(back.channels(), c.channels());
  EXPECT_EQ(back.data(), c.data());
}

}  // namespace
