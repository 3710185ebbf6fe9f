#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "aos/error.hpp"
#include "aos/scene.hpp"
#include "test_support.hpp"

using namespace aos;
using namespace aos::sim;

TEST(Camera, FocalLengthFromFov) {
  const CameraIntrinsics c;
  EXPECT_NEAR(c.focal_px(), 543.2521981843486, 1e-9);
  EXPECT_DOUBLE_EQ(c.cx(), 319.5);
  EXPECT_DOUBLE_EQ(c.cy(), 255.5);
}

TEST(Camera, RejectsDegenerateIntrinsics) {
  EXPECT_THROW((CameraIntrinsics{0.0, 640, 512}.validate()), ValidationError);
  EXPECT_THROW((CameraIntrinsics{180.0, 640, 512}.validate()), ValidationError);
  EXPECT_THROW((CameraIntrinsics{61.0, 0, 512}.validate()), ValidationError);
  EXPECT_NO_THROW(CameraIntrinsics{}.validate());
}

namespace {
Frame blank_frame(double x, const CameraIntrinsics& intr = test::small_camera(), double z = 26.0) {
  return Frame{ImageF(intr.width, intr.height, 1.0f), Pose{x, 0.0, z}, intr};
}
}  // namespace

TEST(ScanStackTest, SortsFramesByX) {
  ScanStack s({blank_frame(2.0), blank_frame(0.0), blank_frame(1.0)});
  EXPECT_EQ(s.x_min(), 0.0);
  EXPECT_EQ(s.x_max(), 2.0);
  EXPECT_EQ(s.frame(1).pose.x, 1.0);
  EXPECT_DOUBLE_EQ(s.spacing(), 1.0);
  EXPECT_DOUBLE_EQ(s.path_center(), 1.0);
}

TEST(ScanStackTest, RejectsInconsistentInput) {
  EXPECT_THROW(ScanStack({}), ValidationError);
  EXPECT_THROW(ScanStack({blank_frame(0.0), blank_frame(0.0)}), ValidationError);
  EXPECT_THROW(ScanStack({blank_frame(0.0), blank_frame(1.0, test::small_camera(), 30.0)}), ValidationError);
  EXPECT_THROW(ScanStack({blank_frame(0.0), blank_frame(1.0, CameraIntrinsics{})}), ValidationError);
  Frame wrong = blank_frame(0.0);
  wrong.image = ImageF(10, 10);
  EXPECT_THROW(ScanStack({wrong}), ValidationError);
}

TEST(ScanStackTest, SingleFrameHasZeroSpacing) {
  ScanStack s({blank_frame(3.0)});
  EXPECT_EQ(s.spacing(), 0.0);
  EXPECT_EQ(s.path_length(), 0.0);
  EXPECT_TRUE(s.correction(0).identity());
}

TEST(ScanStackTest, CorrectionCountMustMatch) {
  EXPECT_THROW(ScanStack({blank_frame(0.0), blank_frame(1.0)}, {FrameCorrection{}}), ValidationError);
}

TEST(ScanPathTest, FrameCountAndValidation) {
  ScanPath p;
  EXPECT_EQ(p.frame_count(), 29u);
  p.length = 0.0;
  EXPECT_EQ(p.frame_count(), 1u);
  p.spacing = 0.0;
  EXPECT_THROW(p.frame_count(), ValidationError);
}

TEST(SceneGeneration, DeterministicPerSeed) {
  const SceneSpec spec = preset(3, 42);
  EXPECT_EQ(generate_scene(spec), generate_scene(spec));
  EXPECT_NE(generate_scene(spec).occluders(), generate_scene(preset(3, 43)).occluders());
}

TEST(SceneGeneration, RenderIsDeterministic) {
  const SceneSpec spec = preset(3, 5);
  const Scene scene = generate_scene(spec);
  const Pose pose{20.0, 20.0, 26.0};
  EXPECT_EQ(render_frame(scene, pose, test::small_camera()).image,
            render_frame(scene, pose, test::small_camera()).image);
}

TEST(SceneGeneration, PoissonCountMatchesDensity) {
  SceneSpec spec;
  spec.extent_x = spec.extent_y = 30.0;
  spec.occluder_layer.density = 0.1;
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    spec.seed = seed;
    total += static_cast<double>(generate_scene(spec).occluders().size());
  }
  const double mean = total / 100.0;
  EXPECT_NEAR(mean, 90.0, 9.0);
}

TEST(SceneGeneration, OccludersStayInsideExtentAndJitterBounds) {
  const SceneSpec spec = preset(3, 9);
  const auto& layer = spec.occluder_layer;
  const Scene scene = generate_scene(spec);
  for (const OccluderDisc& d : scene.occluders()) {
    EXPECT_GE(d.x, 0.0);
    EXPECT_LE(d.x, spec.extent_x);
    EXPECT_LE(std::abs(d.height - layer.crown_height), layer.crown_height_jitter + 1e-12);
    EXPECT_LE(std::abs(d.radius - layer.crown_radius), layer.crown_radius_jitter + 1e-12);
  }
}

TEST(SceneGeneration, ExplicitOccludersAreAppended) {
  SceneSpec spec;
  spec.occluders.push_back(OccluderDisc{5.0, 5.0, 10.0, 1.0, 3.0});
  const Scene s = generate_scene(spec);
  ASSERT_EQ(s.occluders().size(), 1u);
  EXPECT_EQ(s.occluders()[0].temp, 3.0);
}

TEST(SceneGeneration, ValidationRejectsBadSpecs) {
  SceneSpec spec;
  spec.extent_x = 0.0;
  EXPECT_THROW(generate_scene(spec), ValidationError);
  spec = SceneSpec{};
  spec.targets.push_back(TargetSpec{100.0, 1.0});
  EXPECT_THROW(generate_scene(spec), ValidationError);
  spec = SceneSpec{};
  spec.occluder_layer.density = -1.0;
  EXPECT_THROW(generate_scene(spec), ValidationError);
  EXPECT_THROW(preset(5), ValidationError);
  EXPECT_FALSE(preset_by_name("preset9").has_value());
  EXPECT_TRUE(preset_by_name("2").has_value());
}

TEST(Render, UniformGroundRendersConstant) {
  const Scene s = generate_scene(test::bare_ground(15.0));
  const Frame f = render_frame(s, Pose{20.0, 20.0, 26.0}, test::small_camera());
  for (float v : f.image.pixels()) ASSERT_EQ(v, 15.0f);
}

TEST(Render, SingleOccluderAtNadirCoversCenter) {
  SceneSpec spec = test::bare_ground(15.0);
  spec.occluders.push_back(OccluderDisc{20.0, 20.0, 21.0, 2.0, 8.0});
  const Scene s = generate_scene(spec);
  const CameraIntrinsics intr = test::small_camera();
  const Frame f = render_frame(s, Pose{20.0, 20.0, 26.0}, intr);
  EXPECT_EQ(f.image.at(80, 64), 8.0f);
  EXPECT_EQ(f.image.at(0, 0), 15.0f);
  // disc of radius 2 m seen from 5 m above spans f*2/5 pixels of radius
  const double r_px = intr.focal_px() * 2.0 / 5.0;
  EXPECT_EQ(f.image.at(static_cast<int>(intr.cx() + r_px - 1.0), 64), 8.0f);
  EXPECT_EQ(f.image.at(static_cast<int>(intr.cx() + r_px + 1.5), 64), 15.0f);
}

TEST(Render, TargetProjectsToExpectedSize) {
  SceneSpec spec = test::bare_ground(15.0);
  TargetSpec t;
  t.x = 20.0;
  t.y = 20.0;
  t.height = 6.0;
  t.footprint.shape = FootprintShape::box;
  t.footprint.half_x = 1.0;
  t.footprint.half_y = 1.0;
  t.texture_amp = 0.0;
  spec.targets.push_back(t);
  const CameraIntrinsics intr = test::small_camera();
  const Frame f = render_frame(generate_scene(spec), Pose{20.0, 20.0, 26.0}, intr);
  int count = 0;
  for (int i = 0; i < intr.width; ++i) count += f.image.at(i, 64) == 32.0f;
  const double expected = 2.0 * intr.focal_px() / 20.0;
  EXPECT_NEAR(count, expected, 1.5);
}

TEST(Render, CameraBelowSurfaceIsRejected) {
  SceneSpec spec = test::bare_ground();
  spec.occluders.push_back(OccluderDisc{20.0, 20.0, 30.0, 1.0, 8.0});
  EXPECT_THROW(render_frame(generate_scene(spec), Pose{20.0, 20.0, 26.0}, test::small_camera()),
               ValidationError);
}

TEST(Render, ScanMatchesPathPoses) {
  const SceneSpec spec = preset(1);
  const ScanStack s = render_scan(generate_scene(spec), default_path(spec), test::small_camera());
  ASSERT_EQ(s.size(), 29u);
  EXPECT_DOUBLE_EQ(s.x_min(), 13.0);
  EXPECT_DOUBLE_EQ(s.x_max(), 27.0);
  EXPECT_DOUBLE_EQ(s.altitude(), 26.0);
  EXPECT_DOUBLE_EQ(s.y(), 20.0);
}

TEST(Visibility, OpenFieldIsFullyVisible) {
  const Scene s = generate_scene(preset(1));
  EXPECT_EQ(ground_truth_visibility(s, Pose{20.0, 20.0, 26.0}, 0), 1.0);
}

TEST(Visibility, CoveringDiscHidesTarget) {
  SceneSpec spec = preset(1);
  spec.occluders.push_back(OccluderDisc{20.0, 20.0, 21.0, 3.0, 8.0});
  EXPECT_EQ(ground_truth_visibility(generate_scene(spec), Pose{20.0, 20.0, 26.0}, 0), 0.0);
}

TEST(Visibility, OutOfRangeTargetThrows) {
  EXPECT_THROW(ground_truth_visibility(generate_scene(preset(1)), Pose{}, 7), ValidationError);
}

// Independent Monte-Carlo estimate: uniform points on the target top, brute
// force segment/disc tests against every occluder.
TEST(Visibility, MatchesMonteCarloOracle) {
  SceneSpec spec;
  spec.ground_noise_amp = 0.0;
  TargetSpec t;
  t.x = 20.0;
  t.y = 20.0;
  t.height = 1.8;
  t.footprint.shape = FootprintShape::box;
  t.footprint.half_x = 1.0;
  t.footprint.half_y = 1.0;
  spec.targets.push_back(t);
  spec.occluder_layer.density = 0.05;
  spec.occluder_layer.crown_radius = 2.0;
  spec.occluder_layer.crown_height = 21.0;

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  int compared = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    spec.seed = seed;
    const Scene scene = generate_scene(spec);
    for (double cam_x : {14.0, 20.0, 26.0}) {
      const Pose cam{cam_x, 20.0, 26.0};
      const int n = 4000;
      int visible = 0;
      for (int k = 0; k < n; ++k) {
        const double px = t.x + unit(rng) * t.footprint.half_x;
        const double py = t.y + unit(rng) * t.footprint.half_y;
        bool hit = false;
        for (const OccluderDisc& d : scene.occluders()) {
          const double s = (d.height - t.height) / (cam.z - t.height);
          const double qx = px + s * (cam.x - px);
          const double qy = py + s * (cam.y - py);
          if ((qx - d.x) * (qx - d.x) + (qy - d.y) * (qy - d.y) <= d.radius * d.radius) {
            hit = true;
            break;
          }
        }
        visible += !hit;
      }
      const double mc = static_cast<double>(visible) / n;
      EXPECT_NEAR(ground_truth_visibility(scene, cam, 0, 25), mc, 0.05) << "seed " << seed << " x " << cam_x;
      ++compared;
    }
  }
  EXPECT_EQ(compared, 60);
}

TEST(ValueNoise, BoundedAndDeterministic) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng), y = u(rng);
    const double v = value_noise(x, y, 7);
    ASSERT_GE(v, -1.0);
    ASSERT_LE(v, 1.0);
    ASSERT_EQ(v, value_noise(x, y, 7));
  }
}
