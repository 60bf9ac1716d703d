#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <tuple>

#include "mimosar/detector.hpp"

using namespace mimosar;

namespace {

// alpha solving (1 + alpha/n)^-n = P by bisection.
double alpha_by_bisection(std::size_t n, double pfa) {
  double lo = 0.0, hi = 1e9;
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double p = std::pow(1.0 + mid / static_cast<double>(n), -static_cast<double>(n));
    (p > pfa ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

PowerMap exponential_map(std::size_t nr, std::size_t nv, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  PowerMap m(nr, nv);
  for (auto& x : m.data()) x = e(rng);
  return m;
}

// Cross-shaped CA-CFAR written out cell by cell.
std::vector<Cell> cfar_oracle(const PowerMap& m, const CfarParams& p) {
  std::vector<Cell> hits;
  const long nr = static_cast<long>(m.range_points()), nv = static_cast<long>(m.velocity_points());
  for (long v = 0; v < nv; ++v) {
    for (long r = 0; r < nr; ++r) {
      std::vector<std::pair<long, long>> cells;
      for (long d = -static_cast<long>(p.guard_cells + p.training_cells);
           d <= static_cast<long>(p.guard_cells + p.training_cells); ++d) {
        if (std::abs(d) <= static_cast<long>(p.guard_cells)) continue;
        cells.push_back({r + d, v});
        cells.push_back({r, v + d});
      }
      double sum = 0.0;
      std::size_t n = 0;
      for (auto [rr, vv] : cells) {
        if (rr < 0 || rr >= nr || vv < 0 || vv >= nv) continue;
        sum += m.at(rr, vv);
        ++n;
      }
      if (m.at(r, v) > alpha_by_bisection(n, p.probability_false_alarm) * sum / static_cast<double>(n))
        hits.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(v), m.at(r, v)});
    }
  }
  return hits;
}

TEST(Cfar, AlphaMatchesFalseAlarmEquation) {
  for (std::size_t n : {1u, 5u, 16u, 24u, 32u}) {
    for (double p : {1e-2, 1e-4, 1e-6}) {
      EXPECT_NEAR(cfar_alpha(n, p), alpha_by_bisection(n, p), 1e-6 * cfar_alpha(n, p)) << n << " " << p;
    }
  }
}

TEST(Cfar, MatchesCellByCellOracle) {
  std::mt19937_64 rng(3);
  PowerMap m = exponential_map(40, 48, rng);
  m.at(20, 20) = 200.0;
  m.at(1, 1) = 150.0;
  m.at(39, 47) = 90.0;
  const CfarParams p{4, 1, 1e-3};
  const auto got = cfar_2d(m, p);
  const auto ref = cfar_oracle(m, p);
  EXPECT_EQ(got, ref);
  EXPECT_GE(got.size(), 3u);
}

TEST(Cfar, EmpiricalFalseAlarmRate) {
  // i.i.d. exponential power: the CA-CFAR false-alarm rate equals P_fa
  // exactly for every window size, truncated or not.
  std::mt19937_64 rng(17);
  const CfarParams p{8, 2, 1e-3};
  std::size_t alarms = 0, cells = 0;
  for (int k = 0; k < 40; ++k) {
    const PowerMap m = exponential_map(64, 256, rng);
    alarms += cfar_2d(m, p).size();
    cells += m.data().size();
  }
  const double rate = static_cast<double>(alarms) / static_cast<double>(cells);
  EXPECT_GT(rate, 0.8e-3);
  EXPECT_LT(rate, 1.2e-3);
}

TEST(Cfar, Errors) {
  PowerMap small(20, 20);
  EXPECT_THROW(cfar_2d(small, CfarParams{8, 2, 1e-4}), std::invalid_argument);
  EXPECT_THROW(cfar_2d(small, CfarParams{0, 2, 1e-4}), std::invalid_argument);
}

std::vector<Cell> peak_oracle(const std::vector<Cell>& hits, const PowerMap& m) {
  // Total order: power, then lower (m_r, m_v) wins.
  auto key = [&](long r, long v) { return std::make_tuple(m.at(r, v), -r, -v); };
  std::vector<Cell> out;
  for (const auto& c : hits) {
    bool best = true;
    for (long r = static_cast<long>(c.m_r) - 1; r <= static_cast<long>(c.m_r) + 1; ++r)
      for (long v = static_cast<long>(c.m_v) - 1; v <= static_cast<long>(c.m_v) + 1; ++v)
        if (r >= 0 && v >= 0 && r < static_cast<long>(m.range_points()) &&
            v < static_cast<long>(m.velocity_points()) && key(r, v) > key(c.m_r, c.m_v))
          best = false;
    if (best) out.push_back({c.m_r, c.m_v, m.at(c.m_r, c.m_v)});
  }
  return out;
}

TEST(PeakGroup, MatchesBruteForce) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> level(0, 3);  // few levels: many ties
  PowerMap m(12, 10);
  for (auto& x : m.data()) x = level(rng);
  std::vector<Cell> all;
  for (std::size_t v = 0; v < 10; ++v)
    for (std::size_t r = 0; r < 12; ++r) all.push_back({r, v, m.at(r, v)});
  const auto got = peak_group(all, m);
  EXPECT_EQ(got, peak_oracle(all, m));
  // A plateau keeps exactly one cell.
  PowerMap flat(5, 5);
  for (auto& x : flat.data()) x = 1.0;
  std::vector<Cell> center{{2, 2, 1.0}, {1, 1, 1.0}, {0, 0, 1.0}};
  EXPECT_EQ(peak_group(center, flat).size(), 1u);
}

TEST(BinConversion, Units) {
  const RadarConfig cfg = RadarConfig::table1();
  EXPECT_NEAR(range_of_bin(cfg, 1, 64), 28.5516 / 64, 1e-5);
  EXPECT_NEAR(velocity_of_bin(cfg, 129, 256), 3.893409e-3 / (2 * 256 * 90e-6), 1e-8);
  EXPECT_NEAR(velocity_of_bin(cfg, 128, 256), 0.0, 1e-15);
  EXPECT_NEAR(angle_of_bin(cfg, 64, 128), 0.0, 1e-15);
  EXPECT_NEAR(angle_of_bin(cfg, 80, 128), std::asin(16.0 / 128 * 2), 1e-12);
  EXPECT_NEAR(angle_of_bin(cfg, 0, 128), -kPi / 2, 1e-12);
}

TEST(DetectFrame, BroadsideTarget) {
  const RadarConfig cfg = RadarConfig::table1();
  Scene s;
  s.targets.push_back({{0.0, 5.0}, {1, 0}});
  const IqCube c = synthesize_frame(cfg, s, Trajectory({{0, 0}}), 0, kDefaultNoisePower, 9);
  const auto d = detect_frame(c, cfg);
  ASSERT_EQ(d.size(), 1u);
  const DerivedLimits lim = derive_limits(cfg);
  EXPECT_NEAR(d[0].range_m, 5.0, lim.range_resolution_m / 2);
  EXPECT_NEAR(d[0].radial_velocity_mps, 0.0, lim.velocity_resolution_mps / 2);
  EXPECT_NEAR(d[0].azimuth_rad, 0.0, lim.angle_resolution_rad / 2);
}

TEST(DetectFrame, MovingPlatformObliqueTargets) {
  const RadarConfig cfg = RadarConfig::table1();
  Scene s;
  s.targets.push_back({{-3.0, 6.0}, {1, 0}});
  s.targets.push_back({{4.0, 9.0}, {1, 0}});
  const Vec2 v{2.0, 0.5};
  const IqCube c = synthesize_frame(cfg, s, Trajectory({v}), 0, kDefaultNoisePower, 9);
  const auto d = detect_frame(c, cfg);
  ASSERT_EQ(d.size(), 2u);
  const double vbin = cfg.wavelength_m() / (2 * 256 * cfg.chirp_duration_s);
  for (const auto& t : s.targets) {
    const double r = t.position_m.norm(), th = std::asin(t.position_m.x / r);
    const double vr = range_rate({0, 0}, v, t.position_m);
    bool found = false;
    for (const auto& x : d) {
      if (std::abs(x.range_m - r) < 0.45) {
        found = true;
        EXPECT_NEAR(x.radial_velocity_mps, vr, vbin);
        EXPECT_NEAR(x.azimuth_rad, th, deg_to_rad(2.0));
      }
    }
    EXPECT_TRUE(found) << r;
  }
}

TEST(DetectFrame, NoiseOnlyGivesNothing) {
  const RadarConfig cfg = RadarConfig::table1();
  const IqCube c = synthesize_frame(cfg, Scene{}, Trajectory({{0, 0}}), 0, kDefaultNoisePower, 1);
  EXPECT_LE(detect_frame(c, cfg).size(), 3u);
}

}  // namespace
