#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "aos/error.hpp"
#include "aos/perception.hpp"

using namespace aos;
using namespace aos::perception;

// Frozen values from tests/oracles/perception_oracle.py.
namespace oracle {
constexpr double kJddi6 = 0.16401472273815557;
constexpr double kJddi03 = 0.008200736136907779;
constexpr double kDisplay18 = -0.00814111872;
constexpr double kArcmin18 = -11.2614999;
constexpr double kPth18 = 0.276620164;
constexpr double kDisplay03 = -0.00127765936;
constexpr double kArcmin03 = -1.76737053;
constexpr double kPth03 = 0.0479081348;
constexpr double kDisplay21 = -0.459701837;
constexpr double kArcmin21 = -634.096014;
constexpr double kPth21 = 2.17733373;
constexpr double kStandingMinusLying = 9.4941293730107;
constexpr double kFusible18 = 5.32801758;
constexpr double kFusible21 = 0.0943568639;
constexpr double kFusible03 = 33.9495996;
constexpr double kDetectable18 = 0.564160007;
constexpr double kPerceived = 2.9370545454545454;
}  // namespace oracle

TEST(PerceivedDistance, FixationOnScreenForZeroDisparity) {
  EXPECT_DOUBLE_EQ(perceived_distance(0.065, 2.4852, 0.0), 2.4852);
}

TEST(PerceivedDistance, UncrossedDisparityPushesBehindScreen) {
  EXPECT_NEAR(perceived_distance(0.065, 2.4852, 0.01), oracle::kPerceived, 1e-12);
}

TEST(PerceivedDistance, DisparityAtEyeSeparationIsBeyondInfinity) {
  EXPECT_THROW(perceived_distance(0.065, 2.4852, 0.065), BeyondInfinity);
  EXPECT_THROW(perceived_distance(0.065, 2.4852, 0.07), BeyondInfinity);
}

TEST(PerceivedDistance, InverseRoundTrip) {
  const double e = 0.065;
  const double v = 2.4852;
  for (double z : {0.5 * v, v, 2.0 * v, 10.0 * v}) {
    const double back = perceived_distance(e, v, disparity(e, v, z));
    EXPECT_LE(std::abs(back - z) / z, 1e-12) << "z=" << z;
  }
}

TEST(PerceivedDistance, RoundTripHoldsForRandomDistances) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ez(0.02, 0.08), vz(0.3, 10.0), scale(0.05, 50.0);
  for (int i = 0; i < 2000; ++i) {
    const double e = ez(rng);
    const double v = vz(rng);
    const double z = v * scale(rng);
    const double back = perceived_distance(e, v, disparity(e, v, z));
    ASSERT_LE(std::abs(back - z) / z, 1e-12) << "e=" << e << " v=" << v << " z=" << z;
  }
}

TEST(Disparity, RejectsNonPositiveDistance) {
  EXPECT_THROW(disparity(0.065, 2.4852, 0.0), ValidationError);
  EXPECT_THROW(disparity(0.065, 2.4852, -1.0), ValidationError);
}

TEST(Jddi, SixArcminAtDisplayDefaults) {
  EXPECT_NEAR(jddi(ObserverModel{}, DisplayModel{}), oracle::kJddi6, 1e-12);
  EXPECT_NEAR(jddi(ObserverModel{}, DisplayModel{}), 0.164, 5e-4);
}

TEST(Jddi, LinearInAcuity) {
  const DisplayModel d;
  const double fine = jddi(ObserverModel{0.3, 1.0, 60.0}, d);
  EXPECT_NEAR(fine, oracle::kJddi03, 1e-13);
  EXPECT_DOUBLE_EQ(jddi(ObserverModel{6.0, 1.0, 60.0}, d), 20.0 * fine);
}

TEST(Jddi, RejectsNegativeAcuity) {
  EXPECT_THROW(jddi(ObserverModel{-1.0, 1.0, 60.0}, DisplayModel{}), ValidationError);
}

TEST(PerceivedTargetHeight, StandingPersonAtUnitBaseline) {
  const auto r = perceived_target_height(CaptureGeometry{}, DisplayModel{}, 1.8);
  EXPECT_NEAR(r.display_disparity_m, oracle::kDisplay18, 1e-10);
  EXPECT_NEAR(r.display_disparity_arcmin, oracle::kArcmin18, 1e-6);
  ASSERT_TRUE(r.pth_m);
  EXPECT_NEAR(*r.pth_m, oracle::kPth18, 1e-8);
}

TEST(PerceivedTargetHeight, LyingPersonAndCrowns) {
  const auto lying = perceived_target_height(CaptureGeometry{}, DisplayModel{}, 0.3);
  EXPECT_NEAR(lying.display_disparity_m, oracle::kDisplay03, 1e-10);
  EXPECT_NEAR(lying.display_disparity_arcmin, oracle::kArcmin03, 1e-6);
  EXPECT_NEAR(*lying.pth_m, oracle::kPth03, 1e-8);
  const auto crowns = perceived_target_height(CaptureGeometry{}, DisplayModel{}, 21.0);
  EXPECT_NEAR(crowns.display_disparity_m, oracle::kDisplay21, 1e-8);
  EXPECT_NEAR(crowns.display_disparity_arcmin, oracle::kArcmin21, 1e-5);
  EXPECT_NEAR(*crowns.pth_m, oracle::kPth21, 1e-7);
}

TEST(PerceivedTargetHeight, ZeroBaselineGivesZeroHeight) {
  CaptureGeometry cap;
  cap.baseline = 0.0;
  const auto r = perceived_target_height(cap, DisplayModel{}, 1.8);
  EXPECT_EQ(r.display_disparity_m, 0.0);
  EXPECT_EQ(*r.pth_m, 0.0);
}

TEST(PerceivedTargetHeight, GroundTargetHasNoDisparity) {
  const auto r = perceived_target_height(CaptureGeometry{}, DisplayModel{}, 0.0);
  EXPECT_EQ(r.capture_disparity_m, 0.0);
  EXPECT_EQ(*r.pth_m, 0.0);
}

TEST(PerceivedTargetHeight, RejectsTargetsAtOrAboveFocalDistance) {
  EXPECT_THROW(perceived_target_height(CaptureGeometry{}, DisplayModel{}, 26.0), ValidationError);
  EXPECT_THROW(perceived_target_height(CaptureGeometry{}, DisplayModel{}, -0.1), ValidationError);
}

TEST(PerceivedTargetHeight, PthStrictlyIncreasesWithBaseline) {
  for (double ht : {0.3, 1.8, 21.0}) {
    double last = -1.0;
    for (double ef = 0.0; ef <= 8.0; ef += 0.25) {
      CaptureGeometry cap;
      cap.baseline = ef;
      const auto r = perceived_target_height(cap, DisplayModel{}, ht);
      ASSERT_TRUE(r.pth_m);
      EXPECT_GT(*r.pth_m, last) << "ht=" << ht << " ef=" << ef;
      last = *r.pth_m;
    }
  }
}

TEST(DisplayModel, DiagonalFovMapsToNarrowerHorizontal) {
  const auto m = DisplayModel::from_diagonal_fov(68.0, 1.0);
  EXPECT_LT(m.fov_deg, 68.0);
  EXPECT_NEAR(m.fov_deg, 50.99757405576902, 1e-9);
  EXPECT_THROW(DisplayModel::from_diagonal_fov(68.0, 0.0), ValidationError);
}

TEST(DisplayModel, ArcminIsOddAndMatchesSmallAngle) {
  const DisplayModel d;
  EXPECT_DOUBLE_EQ(d.arcmin(-0.001), -d.arcmin(0.001));
  EXPECT_NEAR(d.arcmin(1e-6), 1e-6 / d.image_distance * 60.0 * 180.0 / M_PI, 1e-12);
}

TEST(DisparityGradient, SymmetricAndScaleEquivariant) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-700.0, 700.0), s(0.1, 200.0), k(0.01, 100.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = d(rng), b = d(rng), sep = s(rng), scale = k(rng);
    const double g = disparity_gradient(a, b, sep);
    ASSERT_DOUBLE_EQ(g, disparity_gradient(b, a, sep));
    ASSERT_NEAR(g, disparity_gradient(scale * a, scale * b, scale * sep), 1e-12 * std::max(1.0, g));
    ASSERT_GE(g, 0.0);
  }
}

TEST(DisparityGradient, RejectsNonPositiveSeparation) {
  EXPECT_THROW(disparity_gradient(1.0, 0.0, 0.0), ValidationError);
}

TEST(Evaluate, FlagsAtUnitBaseline) {
  const ObserverModel obs;
  const auto standing = evaluate(CaptureGeometry{}, DisplayModel{}, obs, 1.8);
  EXPECT_TRUE(standing.depth_detectable);
  EXPECT_TRUE(standing.fusible);
  EXPECT_TRUE(standing.perceivable());
  const auto lying = evaluate(CaptureGeometry{}, DisplayModel{}, obs, 0.3);
  EXPECT_FALSE(lying.depth_detectable);
  const auto crowns = evaluate(CaptureGeometry{}, DisplayModel{}, obs, 21.0);
  EXPECT_FALSE(crowns.fusible);
  EXPECT_NEAR(crowns.gradient, std::abs(oracle::kArcmin21) / 60.0, 1e-6);
}

TEST(Evaluate, StandingMinusLyingDisparity) {
  const auto standing = evaluate(CaptureGeometry{}, DisplayModel{}, ObserverModel{}, 1.8);
  const auto lying = evaluate(CaptureGeometry{}, DisplayModel{}, ObserverModel{}, 0.3);
  EXPECT_NEAR(std::abs(standing.display_disparity_arcmin - lying.display_disparity_arcmin),
              oracle::kStandingMinusLying, 1e-6);
}

TEST(BaselineLimits, ClosedFormsMatchOracle) {
  const CaptureGeometry cap;
  const DisplayModel disp;
  const ObserverModel obs;
  EXPECT_NEAR(*max_fusible_baseline(cap, disp, obs, 1.8), oracle::kFusible18, 1e-6);
  EXPECT_NEAR(*max_fusible_baseline(cap, disp, obs, 21.0), oracle::kFusible21, 1e-8);
  EXPECT_NEAR(*max_fusible_baseline(cap, disp, obs, 0.3), oracle::kFusible03, 1e-5);
  EXPECT_NEAR(*detectable_baseline(cap, disp, obs, 1.8), oracle::kDetectable18, 1e-8);
  EXPECT_FALSE(max_fusible_baseline(cap, disp, obs, 0.0).has_value());
  EXPECT_FALSE(detectable_baseline(cap, disp, obs, 0.0).has_value());
}

TEST(BaselineLimits, FlagsFlipAtTheClosedForms) {
  const DisplayModel disp;
  const ObserverModel obs;
  for (double ht : {0.3, 1.8, 21.0}) {
    const double det = *detectable_baseline(CaptureGeometry{}, disp, obs, ht);
    const double fus = *max_fusible_baseline(CaptureGeometry{}, disp, obs, ht);
    for (double factor : {0.999, 1.001}) {
      CaptureGeometry cap;
      cap.baseline = det * factor;
      EXPECT_EQ(evaluate(cap, disp, obs, ht).depth_detectable, factor > 1.0) << "ht=" << ht;
      cap.baseline = fus * factor;
      EXPECT_EQ(evaluate(cap, disp, obs, ht).fusible, factor < 1.0) << "ht=" << ht;
    }
  }
}

TEST(FeasibilityRegion, TargetMajorLayout) {
  const auto t = feasibility_region(CaptureGeometry{}, DisplayModel{}, ObserverModel{}, {0.3, 1.8, 21.0},
                                    {0.0, 1.0, 2.0});
  ASSERT_EQ(t.rows.size(), 9u);
  EXPECT_EQ(t.at(1, 2).target_height, 1.8);
  EXPECT_EQ(t.at(1, 2).baseline, 2.0);
  EXPECT_EQ(t.at(2, 0).target_height, 21.0);
}

TEST(FeasibilityRegion, ZeroBaselineRowsHaveZeroPth) {
  const auto t =
      feasibility_region(CaptureGeometry{}, DisplayModel{}, ObserverModel{}, {0.3, 1.8, 21.0}, {0.0, 1.0});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(*t.at(i, 0).pth_m, 0.0);
}

TEST(FeasibilityRegion, RejectsEmptyGrids) {
  EXPECT_THROW(feasibility_region(CaptureGeometry{}, DisplayModel{}, ObserverModel{}, {}, {1.0}), ValidationError);
}

TEST(FeasibilityRegion, InvalidPhysiologyIsRejected) {
  DisplayModel bad;
  bad.eye_separation = 0.0;
  EXPECT_THROW(feasibility_region(CaptureGeometry{}, bad, ObserverModel{}, {1.8}, {1.0}), ValidationError);
  ObserverModel obs;
  obs.gradient_limit = 0.0;
  EXPECT_THROW(feasibility_region(CaptureGeometry{}, DisplayModel{}, obs, {1.8}, {1.0}), ValidationError);
}

TEST(FeasibilityCsv, ReReadFlagsMatchRecomputation) {
  const ObserverModel obs;
  std::vector<double> baselines;
  for (double ef = 0.0; ef <= 8.0; ef += 0.5) baselines.push_back(ef);
  const auto t = feasibility_region(CaptureGeometry{}, DisplayModel{}, obs, {0.3, 1.8, 21.0}, baselines);
  std::stringstream ss;
  write_feasibility_csv(ss, t);
  const auto rows = read_feasibility_csv(ss);
  ASSERT_EQ(rows.size(), t.rows.size());
  for (const auto& row : rows) {
    PerceptionResult r;
    r.pth_m = row.pth_m;
    r.beyond_infinity = !row.pth_m;
    r.jddi_m = row.jddi_m;
    r.gradient = row.gradient;
    derive_flags(r, obs);
    EXPECT_EQ(r.depth_detectable, row.detectable) << row.target_h << "," << row.e_f;
    EXPECT_EQ(r.fusible, row.fusible) << row.target_h << "," << row.e_f;
  }
}

TEST(FeasibilityCsv, HeaderAndSixDigitFormatting) {
  const auto t = feasibility_region(CaptureGeometry{}, DisplayModel{}, ObserverModel{}, {1.8}, {1.0});
  std::stringstream ss;
  write_feasibility_csv(ss, t);
  std::string header, row;
  std::getline(ss, header);
  std::getline(ss, row);
  EXPECT_EQ(header, "target_h,e_f,d_display_m,d_display_arcmin,gradient,PTH_m,JDDI_m,detectable,fusible");
  EXPECT_EQ(row, "1.8,1,-0.00814112,-11.2615,0.187692,0.27662,0.164015,1,1");
}
