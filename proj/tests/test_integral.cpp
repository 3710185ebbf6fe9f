#include <gtest/gtest.h>

#include <cmath>

#include "aos/error.hpp"
#include "aos/integral.hpp"
#include "test_support.hpp"

using namespace aos;
using namespace aos::integral;

namespace {

const ScanStack& preset1_small() {
  static const ScanStack s = test::preset_stack(1, 1, test::small_camera());
  return s;
}

const ScanStack& preset3_small() {
  static const ScanStack s = test::preset_stack(3, 1, test::small_camera());
  return s;
}

}  // namespace

TEST(WindowFrames, ClosedIntervalIncludesEdges) {
  const ScanStack& s = preset1_small();
  EXPECT_EQ(window_frames(s, 20.0, 0.0).size(), 1u);
  EXPECT_EQ(window_frames(s, 20.0, 1.0).size(), 3u);
  EXPECT_EQ(window_frames(s, 20.0, 4.0).size(), 9u);
  EXPECT_EQ(window_frames(s, 20.0, 14.0).size(), 29u);
  EXPECT_EQ(window_frames(s, 20.25, 0.0).size(), 0u);
}

TEST(Integrate, ZeroApertureOnPoseReproducesFrame) {
  const ScanStack& s = preset3_small();
  for (std::size_t i : {0u, 7u, 14u, 28u}) {
    const Frame& f = s.frame(i);
    const IntegralImage img = integrate(s, {f.pose.x, 0.0, 26.0});
    EXPECT_EQ(img.image, f.image) << "frame " << i;
    EXPECT_EQ(img.frame_count(), 1u);
  }
}

TEST(Integrate, IdentityHoldsForAnyFocalDistance) {
  const ScanStack& s = preset3_small();
  for (double h : {1.0, 5.0, 24.2, 26.0, 100.0}) {
    EXPECT_EQ(integrate(s, {20.0, 0.0, h}).image, s.frame(14).image) << "h=" << h;
  }
}

TEST(Integrate, EmptyWindowIsValidationError) {
  try {
    integrate(preset1_small(), {20.25, 0.0, 26.0});
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("no frames"), std::string::npos);
    EXPECT_NE(e.constraint().find("13"), std::string::npos);
  }
}

TEST(Integrate, RejectsBadParameters) {
  EXPECT_THROW(integrate(preset1_small(), {20.0, -1.0, 26.0}), ValidationError);
  EXPECT_THROW(integrate(preset1_small(), {20.0, 1.0, 0.0}), ValidationError);
  EXPECT_THROW(integrate(preset1_small(), {std::nan(""), 1.0, 26.0}), ValidationError);
}

TEST(Integrate, CoverageCountsWindowFrames) {
  const IntegralImage img = integrate(preset1_small(), {20.0, 4.0, 26.0});
  EXPECT_EQ(img.frame_count(), 9u);
  EXPECT_EQ(img.coverage.at(80, 64), 9);
  // the left edge is missed by frames shifted right
  EXPECT_LT(img.coverage.at(0, 64), 9);
}

TEST(Integrate, FlatGroundIsUnchangedByAveraging) {
  const sim::Scene scene = sim::generate_scene(test::bare_ground(15.0));
  const ScanStack s = sim::render_scan(scene, sim::default_path(scene.spec()), test::small_camera());
  const IntegralImage img = integrate(s, {20.0, 14.0, 26.0});
  for (std::size_t i = 0; i < img.image.size(); ++i) {
    if (!img.coverage.pixels()[i]) continue;
    ASSERT_NEAR(img.image.pixels()[i], 15.0f, 1e-5);
  }
}

TEST(Integrate, InputOrderDoesNotMatter) {
  const ScanStack& s = preset3_small();
  std::vector<Frame> reversed(s.frames().rbegin(), s.frames().rend());
  const ScanStack r(std::move(reversed));
  EXPECT_EQ(integrate(s, {20.0, 6.0, 24.2}).image, integrate(r, {20.0, 6.0, 24.2}).image);
}

TEST(Integrate, CorrectionIsApplied) {
  const ScanStack& s = preset1_small();
  std::vector<FrameCorrection> corr(s.size(), FrameCorrection{2.0, 1.0});
  const ScanStack c(s.frames(), corr);
  const IntegralImage a = integrate(s, {20.0, 0.0, 26.0});
  const IntegralImage b = integrate(c, {20.0, 0.0, 26.0});
  EXPECT_NEAR(b.image.at(10, 10), 2.0f * a.image.at(10, 10) + 1.0f, 1e-4);
}

TEST(ProjectToViewpoint, SamePoseIsIdentity) {
  const Frame& f = preset3_small().frame(3);
  const RegisteredImage r = project_to_viewpoint(f, f.pose, 26.0);
  EXPECT_EQ(r.image, f.image);
  for (auto c : r.covered.pixels()) ASSERT_EQ(c, 1);
}

TEST(ProjectToViewpoint, IntegerShiftMovesPixels) {
  const Frame& f = preset3_small().frame(3);
  const double f_px = f.intrinsics.focal_px();
  // choose the offset that shifts exactly 4 pixels at h = 26
  const double dx = 4.0 * 26.0 / f_px;
  const Pose target{f.pose.x + dx, f.pose.y, f.pose.z};
  const RegisteredImage r = project_to_viewpoint(f, target, 26.0);
  EXPECT_EQ(r.image.at(50, 40), f.image.at(54, 40));
  EXPECT_EQ(r.covered.at(f.image.width() - 1, 40), 0);
}

TEST(ProjectToViewpoint, AltitudeMismatchRejected) {
  const Frame& f = preset3_small().frame(0);
  EXPECT_THROW(project_to_viewpoint(f, Pose{f.pose.x, f.pose.y, 30.0}, 26.0), ValidationError);
}

TEST(Stereo, ZeroBaselineGivesIdenticalEyes) {
  const StereoPair p = stereo_pair(preset3_small(), 20.0, 0.0, 2.0, 26.0);
  EXPECT_EQ(p.left.image, p.right.image);
}

TEST(Stereo, EyesShareTheCenterGrid) {
  const StereoPair p = stereo_pair(preset3_small(), 20.0, 2.0, 2.0, 26.0);
  EXPECT_DOUBLE_EQ(p.left.grid_pose.x, 20.0);
  EXPECT_DOUBLE_EQ(p.right.grid_pose.x, 20.0);
  EXPECT_DOUBLE_EQ(p.left.params.viewpoint, 19.0);
  EXPECT_DOUBLE_EQ(p.right.params.viewpoint, 21.0);
}

TEST(Stereo, InfeasibleBaselineReportsConstraint) {
  try {
    stereo_pair(preset1_small(), 20.0, 14.0, 2.0, 26.0);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.constraint(), "e_f = 14 m - a is the maximum (e_f <= 12 m for a=2 m)");
  }
  EXPECT_NO_THROW(stereo_pair(preset1_small(), 20.0, 12.0, 2.0, 26.0));
  EXPECT_THROW(stereo_pair(preset1_small(), 20.0, -1.0, 2.0, 26.0), ValidationError);
}

TEST(Stereo, SideBySideLayout) {
  const StereoPair p = stereo_pair(preset3_small(), 20.0, 1.0, 2.0, 26.0);
  const ImageF sbs = compose_side_by_side(p);
  ASSERT_EQ(sbs.width(), 2 * p.left.image.width());
  EXPECT_EQ(sbs.at(5, 7), p.left.image.at(5, 7));
  EXPECT_EQ(sbs.at(p.left.image.width() + 5, 7), p.right.image.at(5, 7));
}

TEST(Stereo, AnaglyphSplitsBackWithinQuantization) {
  const StereoPair p = stereo_pair(preset3_small(), 20.0, 1.0, 2.0, 26.0);
  const DisplayRange range = display_range(p);
  ASSERT_LT(range.lo, range.hi);
  const ImageRgb8 ana = compose_anaglyph(p, range);
  const auto [l, r] = split_anaglyph(ana, range);
  const double tol = (range.hi - range.lo) / 255.0 * 0.5 + 1e-4;
  for (int y = 0; y < l.height(); y += 7) {
    for (int x = 0; x < l.width(); x += 5) {
      if (!p.left.coverage.at(x, y) || !p.right.coverage.at(x, y)) continue;
      ASSERT_NEAR(l.at(x, y), p.left.image.at(x, y), tol);
      ASSERT_NEAR(r.at(x, y), p.right.image.at(x, y), tol);
      ASSERT_EQ(ana.at(x, y)[1], ana.at(x, y)[2]);
    }
  }
}

TEST(Stereo, DisplayRangeQuantizeEndpoints) {
  const DisplayRange r{10.0, 20.0};
  EXPECT_EQ(r.quantize(10.0), 0);
  EXPECT_EQ(r.quantize(20.0), 255);
  EXPECT_EQ(r.quantize(-5.0), 0);
  EXPECT_EQ(r.quantize(99.0), 255);
  EXPECT_DOUBLE_EQ(r.dequantize(255), 20.0);
  EXPECT_EQ(DisplayRange{}.quantize(0.5), 128);
}

// A tiny disc at 21 m seen through a 4 m aperture focused on the ground
// spreads into N copies spanning a (h - h_o) / (h_o distance) meters.
TEST(PointSpread, SmallDiscSpreadsAcrossAperture) {
  sim::SceneSpec spec = test::bare_ground(15.0);
  spec.occluders.push_back(sim::OccluderDisc{20.0, 20.0, 21.0, 0.1, 0.0});
  const sim::Scene scene = sim::generate_scene(spec);
  const CameraIntrinsics intr = test::small_camera();
  const ScanStack s = sim::render_scan(scene, sim::default_path(spec), intr);
  const IntegralImage img = integrate(s, {20.0, 4.0, 26.0});
  const int row = static_cast<int>(intr.cy());
  int first = -1, last = -1;
  float darkest = 15.0f;
  for (int x = 0; x < intr.width; ++x) {
    if (!img.coverage.at(x, row)) continue;
    const float v = img.image.at(x, row);
    if (v < 15.0f - 1e-3f) {
      if (first < 0) first = x;
      last = x;
      darkest = std::min(darkest, v);
    }
  }
  ASSERT_GE(first, 0);
  const double ground_sample = 26.0 / intr.focal_px();
  const double extent_m = (last - first) * ground_sample;
  const double disc_m = 2.0 * 0.1 * 26.0 / 5.0;
  EXPECT_NEAR(extent_m, 16.8 + disc_m, 3.0 * ground_sample + 0.5);
  // each copy carries 1/9 of the single-frame contrast
  EXPECT_NEAR(15.0 - darkest, 15.0 / 9.0, 0.2);
}
