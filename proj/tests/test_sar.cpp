#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mimosar/sar.hpp"
#include "oracles.hpp"

using namespace mimosar;

namespace {

const RadarConfig kCfg = RadarConfig::table1();

TEST(PixelGeometry, HandComputed) {
  const auto g = pixel_geometry(30, 40, 0.1, 0.1, {0.0, 0.0});
  ASSERT_TRUE(g);
  EXPECT_NEAR(g->distance_m, 5.0, 1e-12);
  EXPECT_NEAR(g->x_offset_m, -3.0, 1e-12);
  EXPECT_NEAR(g->azimuth_rad, std::asin(-0.6), 1e-12);
  EXPECT_FALSE(pixel_geometry(10, 10, 0.1, 0.1, {1.0, 1.0}));
}

TEST(BinLookup, RangeFloorsAtBinEdges) {
  const double bin = kSpeedOfLight * kCfg.adc_sampling_rate_sps / (2 * kCfg.sweep_slope_hz_per_s * 64);
  EXPECT_EQ(range_bin_of(kCfg, 11 * bin + 1e-9, 64), 11);
  EXPECT_EQ(range_bin_of(kCfg, 11 * bin - 1e-9, 64), 10);
  EXPECT_EQ(range_bin_of(kCfg, 11.99 * bin, 64), 11);
}

TEST(BinLookup, AngleFollowsPixelSide) {
  // Pixel to the +x side of the radar lands above the centre bin.
  const double lambda = kCfg.wavelength_m(), h = kCfg.virtual_rx_spacing_m;
  const double d = 5.0;
  for (long k = -7; k <= 7; ++k) {
    const double sin_t = (static_cast<double>(k) + 0.5) / 16 * lambda / h;
    const double x_pixel_minus_radar = d * sin_t;
    EXPECT_EQ(angle_bin_of(kCfg, d, -x_pixel_minus_radar, 16), 8 + k) << k;
  }
}

TEST(MatchedFilter, UnitModulusAndPhase) {
  for (double d : {0.0, 1.234, 5.0, 17.77}) {
    const cplx h = matched_filter(kCfg, d);
    EXPECT_NEAR(std::abs(h), 1.0, 1e-12);
    EXPECT_NEAR(std::remainder(std::arg(h) - 4 * kPi * d / kCfg.wavelength_m(), kTwoPi), 0.0, 1e-6);
  }
  EXPECT_THROW(matched_filter(kCfg, -1.0), std::invalid_argument);
}

TEST(Lookup, VelocityArgmaxAndClipping) {
  RvaCube rva;
  rva.bins = ComplexCube(4, 5, 2);
  rva.bins.at(2, 1, 1) = {3, 0};
  rva.bins.at(2, 3, 1) = {0, 3};  // tie: the lower bin wins
  EXPECT_EQ(strongest_velocity_bin(rva, 2, 1), 1u);
  RvaCube big;
  big.bins = ComplexCube(64, 20, 16);
  EXPECT_FALSE(lookup_measurement(big, kCfg, 40.0, 0.0));  // beyond R_max
  EXPECT_FALSE(lookup_measurement(big, kCfg, 5.0, 6.0));   // beyond the angle span
  EXPECT_TRUE(lookup_measurement(big, kCfg, 5.0, 0.0));
}

TEST(Roi, RectangleAndImage) {
  Detection d;
  d.range_m = 5.0;
  d.azimuth_rad = deg_to_rad(30.0);
  const Roi roi = build_roi({d}, {1.0, 0.0}, 0.9, deg_to_rad(5.0));
  ASSERT_EQ(roi.rects.size(), 1u);
  EXPECT_NEAR(roi.rects[0].center.x, 1.0 + 2.5, 1e-12);
  EXPECT_NEAR(roi.rects[0].center.y, 5.0 * std::cos(deg_to_rad(30.0)), 1e-12);
  EXPECT_NEAR(roi.rects[0].width_m, 5.0 * deg_to_rad(5.0), 1e-12);
  const SarImage img = make_roi_image(roi, 0.01, 0.1);
  // 0.436 m wide at 1 cm, 0.9 m tall at 10 cm.
  EXPECT_NEAR(static_cast<double>(img.nx()), 44.0, 1.0);
  EXPECT_NEAR(static_cast<double>(img.ny()), 9.0, 1.0);
  EXPECT_EQ(img.active_count(), img.nx() * img.ny());

  const SarImage empty = make_roi_image(Roi{}, 0.01, 0.1);
  EXPECT_EQ(empty.nx() * empty.ny(), 1u);
  EXPECT_EQ(empty.active_count(), 0u);
  EXPECT_THROW(build_roi({d}, {0, 0}, 0.0, 0.1), std::invalid_argument);
}

TEST(Roi, UnionLeavesGapsInactive) {
  Detection a, b;
  a.range_m = b.range_m = 5.0;
  a.azimuth_rad = deg_to_rad(-30.0);
  b.azimuth_rad = deg_to_rad(30.0);
  const SarImage img = make_roi_image(build_roi({a, b}, {0, 0}, 0.9, deg_to_rad(5.0)), 0.01, 0.1);
  EXPECT_LT(img.active_count(), img.nx() * img.ny());
  // The midpoint between the two rectangles is outside both.
  const long kx = 0 - img.kx0();
  const long ky = std::lround(5.0 * std::cos(deg_to_rad(30.0)) / 0.1) - img.ky0();
  EXPECT_FALSE(img.active(static_cast<std::size_t>(kx), static_cast<std::size_t>(ky)));
}

std::vector<IqCube> frames_for(const Scene& s, const Trajectory& t, std::size_t n, double noise = 0.0) {
  std::vector<IqCube> out;
  for (std::size_t p = 0; p < n; ++p) out.push_back(synthesize_frame(kCfg, s, t, p, noise, 1));
  return out;
}

TEST(Backprojection, BlankPixelsStayZero) {
  Scene s;
  s.targets.push_back({{-0.3, 5.0}, {1, 0}});
  s.targets.push_back({{1.0, 5.0}, {1, 0}});
  const Trajectory t({{1, 0}, {1, 0}});
  Detection a;
  a.range_m = 5.0;
  a.azimuth_rad = std::asin(-0.3 / 5.0);
  Detection b = a;
  b.azimuth_rad = std::asin(1.0 / 5.1);
  const Roi roi = build_roi({a, b}, {0, 0}, 0.9, deg_to_rad(5.0));
  const SarRun run = image_region(frames_for(s, t, 2, 0.01), t, roi, kCfg, SarParams{});
  std::size_t touched = 0;
  for (std::size_t iy = 0; iy < run.image.ny(); ++iy) {
    for (std::size_t ix = 0; ix < run.image.nx(); ++ix) {
      if (!run.image.active(ix, iy)) {
        EXPECT_EQ(run.image.at(ix, iy), cplx(0.0, 0.0));
      } else if (run.image.at(ix, iy) != cplx(0.0, 0.0)) {
        ++touched;
      }
    }
  }
  EXPECT_GT(touched, 0u);
  EXPECT_EQ(run.image.snapshots, 2u * 12u);
}

TEST(Backprojection, EmptyRoiCostsNothing) {
  Scene s;
  s.targets.push_back({{0.0, 5.0}, {1, 0}});
  const Trajectory t({{1, 0}});
  const SarRun run = image_region(frames_for(s, t, 1), t, Roi{}, kCfg, SarParams{});
  EXPECT_EQ(run.flops.total(), 0u);
  EXPECT_EQ(run.image.active_count(), 0u);
  EXPECT_FALSE(find_peak(run.image));
}

TEST(Backprojection, CoherentGainIsLinear) {
  // A single pixel on a noise-free target gains the same amount per
  // snapshot when the phase history is compensated.
  Scene s;
  const Vec2 tgt{0.0, 5.0};
  s.targets.push_back({tgt, {1, 0}});
  const Trajectory t({{1, 0}, {1, 0}, {1, 0}});
  SarImage img(0, 50, 1, 1, 0.01, 0.1);
  img.set_active(0, 0);
  std::vector<double> n, mag;
  for (std::size_t p = 0; p < 3; ++p) {
    const IqCube cube = synthesize_frame(kCfg, s, t, p, 0.0, 1);
    for (std::size_t l = 0; l < 12; ++l) {
      const RvaCube rva = snapshot_rva(cube, l, 20, kCfg);
      accumulate_snapshot(img, rva, kCfg, t.position(kCfg, p, l * 20));
      n.push_back(static_cast<double>(img.snapshots));
      mag.push_back(std::abs(img.at(0, 0)));
    }
  }
  const auto fit = oracle::fit_line(n, mag);
  EXPECT_GE(fit.r2, 0.99);
  EXPECT_GT(fit.slope, 0.0);
}

TEST(Backprojection, FocusesBroadsideTarget) {
  Scene s;
  s.targets.push_back({{0.0, 5.0}, {1, 0}});
  const Trajectory t(std::vector<Vec2>(6, Vec2{1, 0}));
  Detection d;
  d.range_m = 5.0;
  const Roi roi = build_roi({d}, {0, 0}, 0.9, deg_to_rad(5.0));
  const SarRun run = image_region(frames_for(s, t, 6), t, roi, kCfg, SarParams{});
  const auto pk = find_peak(run.image);
  ASSERT_TRUE(pk);
  EXPECT_NEAR(pk->x_m, 0.0, 0.021);
  EXPECT_NEAR(pk->y_m, 5.0, 0.21);
  const auto left = find_peak_in(run.image, -0.2, -0.05, 4.5, 5.5);
  ASSERT_TRUE(left);
  EXPECT_LT(left->magnitude, pk->magnitude);
}

TEST(Baseline, FocusesBroadsideTarget) {
  Scene s;
  s.targets.push_back({{0.0, 5.0}, {1, 0}});
  const Trajectory t(std::vector<Vec2>(2, Vec2{1, 0}));
  SarImage plane = make_plane_image(-0.3, 0.3, 4.5, 5.5, 0.01, 0.1);
  const SarRun run = baseline_backprojection(frames_for(s, t, 2), t, plane, kCfg);
  const auto pk = find_peak(run.image);
  ASSERT_TRUE(pk);
  EXPECT_NEAR(pk->x_m, 0.0, 0.05);
  EXPECT_NEAR(pk->y_m, 5.0, 0.5);
  EXPECT_EQ(run.image.snapshots, 2 * kCfg.chirps_per_frame);
  EXPECT_GT(run.flops.backprojection, 0u);
}

TEST(RangeAngle, PeakOnTargetBins) {
  Scene s;
  const double sin_t = -2.0 / 16 * kCfg.wavelength_m() / kCfg.virtual_rx_spacing_m;
  const double r = 12.0 * kCfg.adc_sampling_rate_sps * kSpeedOfLight / (2 * kCfg.sweep_slope_hz_per_s * 64);
  s.targets.push_back({{r * sin_t, r * std::sqrt(1 - sin_t * sin_t)}, {1, 0}});
  const IqCube c = synthesize_frame(kCfg, s, Trajectory({{0, 0}}), 0, 0.0, 1);
  const RangeAngleImage ra = range_angle_image(c, kCfg, 64, 16);
  std::size_t br = 0, ba = 0;
  for (std::size_t a = 0; a < 16; ++a)
    for (std::size_t m = 0; m < 64; ++m)
      if (ra.at(m, a) > ra.at(br, ba)) {
        br = m;
        ba = a;
      }
  EXPECT_EQ(br, 12u);
  EXPECT_EQ(ba, 6u);
  EXPECT_NEAR(ra.at(br, ba), 64 * 8 * 0.5, 1e-6);
  IqCube wrong(64, 255, 4, 0);  // 4 channels for a 2 x 4 radar
  EXPECT_THROW(range_angle_image(wrong, kCfg), std::invalid_argument);
}

TEST(Export, PgmAndCsv) {
  SarImage img(-1, 2, 3, 2, 0.01, 0.1);
  img.set_active(0, 0);
  img.set_active(2, 1);
  img.at(2, 1) = {3, 4};
  std::ostringstream pgm;
  write_pgm(pgm, img);
  const std::string p = pgm.str();
  EXPECT_EQ(p.substr(0, 11), "P5\n3 2\n255\n");
  ASSERT_EQ(p.size(), 11u + 6u);
  EXPECT_EQ(static_cast<unsigned char>(p[11 + 2]), 255);  // top row is the larger y
  std::ostringstream csv;
  write_image_csv(csv, img);
  EXPECT_EQ(csv.str(), "kx,ky,re,im\n-1,2,0,0\n1,3,3,4\n");
}

}  // namespace
