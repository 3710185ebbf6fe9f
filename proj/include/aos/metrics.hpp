#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "aos/integral.hpp"
#include "aos/perception.hpp"
#include "aos/scene.hpp"

namespace aos::metrics {

// ---------------------------------------------------------------------------
// Disparity

struct BlockMatchOptions {
  int max_disparity = 16;          ///< search range, pixels each direction
  double min_texture_std = 1e-3;   ///< template std below this is textureless
};

/// Signed horizontal disparity, x_right - x_left. Elevated targets (in front
/// of the focal plane) come out negative, matching the sign of capture and
/// display disparities in the perception model.
struct DisparityMeasurement {
  std::optional<double> disparity_px;
  std::optional<double> disparity_arcmin;  ///< visual angle on the display model
  double confidence = 0.0;                 ///< peak NCC clamped to [0, 1]
  PixelRect region;
};

/// Block-matches the `region` of `left` along the rows of `right` with zero
/// mean normalized cross-correlation and refines the peak with a parabola.
/// Optional coverage images exclude uncovered pixels from candidate windows.
DisparityMeasurement match_horizontal(const ImageF& left, const ImageF& right, const PixelRect& region,
                                      const BlockMatchOptions& options = {},
                                      const Image<std::uint16_t>* left_coverage = nullptr,
                                      const Image<std::uint16_t>* right_coverage = nullptr);

/// match_horizontal on a stereo pair; the arcmin value maps pixels to display
/// meters (2 v_d tan(FOV_d/2) / width) and then to visual angle.
DisparityMeasurement measured_disparity(const integral::StereoPair& pair, const PixelRect& region,
                                        const BlockMatchOptions& options = {},
                                        const perception::DisplayModel& display = {});

/// f_px * e_f * (1/(h - h_t) - 1/h), magnitude of the expected disparity.
double expected_disparity_px(double focal_px, double baseline, double focal_distance, double target_height);

// ---------------------------------------------------------------------------
// Target geometry in integral pixel space

/// Pixels of an integral grid whose ray, seen from `viewpoint_x`, lands on
/// the top surface of the target.
Image<std::uint8_t> target_mask(const sim::Scene& scene, std::size_t target_index,
                                const integral::IntegralImage& integral, double viewpoint_x);

/// Bounding rectangle of target_mask, shrunk by `shrink` pixels per side.
PixelRect target_rect(const sim::Scene& scene, std::size_t target_index,
                      const integral::IntegralImage& integral, double viewpoint_x, int shrink = 0);

/// Target rectangle at the integral's viewpoint grown by half its larger side
/// on every edge (clipped to the image), so it holds target and local ground.
PixelRect target_context_rect(const sim::Scene& scene, std::size_t target_index,
                              const integral::IntegralImage& integral);

/// Pixels that see the target top from both ends of the aperture window,
/// eroded by `margin` pixels. Empty when the window is wider than the target.
Image<std::uint8_t> target_core_mask(const sim::Scene& scene, std::size_t target_index,
                                     const integral::IntegralImage& integral, int margin = 1);

/// Pixels that see the target top from both ends of the integral's aperture
/// window, so every contributing frame shows target there. Falls back to
/// target_rect(viewpoint, shrink + 1) when the window is wider than the target.
/// The default margin keeps bilinear taps off the target edge.
PixelRect target_core_rect(const sim::Scene& scene, std::size_t target_index,
                           const integral::IntegralImage& integral, int shrink = 2);

// ---------------------------------------------------------------------------
// Contrast, rivalry, suppression

struct Contrast {
  std::optional<double> michelson;  ///< absent when max + min == 0
  double rms = 0.0;                 ///< standard deviation of the region
};

Contrast contrast_metric(const ImageF& image, const PixelRect& region,
                         const Image<std::uint16_t>* coverage = nullptr);
Contrast contrast_metric(const integral::IntegralImage& integral, const PixelRect& region);

struct RivalryReference {
  double ground_radiance = 15.0;
  double occluder_radiance = 8.0;
};

RivalryReference rivalry_reference(const sim::Scene& scene);

/// Mean |left - right| over pixels where either eye is nearer the occluder
/// radiance than the ground radiance, divided by the pair's dynamic range.
/// Zero when no such pixel exists.
double rivalry_score(const integral::StereoPair& pair, const RivalryReference& reference);

/// Fraction of target-footprint pixels whose integral value is nearer the
/// target radiance than the occluder radiance. The footprint is the
/// target_core_mask (margin 1), or the plain target mask when that is empty.
/// Throws UnsupportedError when `ground_truth` is null.
double occlusion_suppression_score(const integral::IntegralImage& integral, const sim::Scene* ground_truth,
                                   std::size_t target_index);

// ---------------------------------------------------------------------------
// Parameter sweep

enum class SweepMetric { confidence, rivalry, suppression, composite };

std::string to_string(SweepMetric metric);
std::optional<SweepMetric> parse_sweep_metric(const std::string& name);

struct SweepSetup {
  SweepMetric metric = SweepMetric::composite;
  double center = 0.0;  ///< u
  double focal_distance = 26.0;
  const sim::Scene* ground_truth = nullptr;
  std::size_t target_index = 0;
  std::optional<PixelRect> region;  ///< overrides the ground-truth target region
  std::optional<RivalryReference> reference;
  BlockMatchOptions match;
};

/// One metric evaluation at (e_f, a). composite = suppression * confidence /
/// (1 + rivalry), a labeled proxy for observer performance.
double evaluate_metric(const ScanStack& stack, const SweepSetup& setup, double baseline, double aperture);

struct SweepGrid {
  std::string metric;
  std::vector<double> baselines;
  std::vector<double> apertures;
  /// baseline-major: cells[b * apertures.size() + a]; nullopt marks infeasible
  std::vector<std::optional<double>> cells;

  const std::optional<double>& at(std::size_t b, std::size_t a) const {
    return cells.at(b * apertures.size() + a);
  }
  struct Cell {
    std::size_t baseline_index;
    std::size_t aperture_index;
    double value;
  };
  std::optional<Cell> argmax() const;
};

/// Evaluates the metric on every cell. Cells with e_f + a beyond the path
/// length (or an empty window) are marked infeasible.
SweepGrid parameter_sweep(const ScanStack& stack, const SweepSetup& setup,
                          const std::vector<double>& baselines, const std::vector<double>& apertures);

/// Columns: metric,e_f,a,value,feasible. Infeasible cells write "infeasible".
void write_sweep_csv(std::ostream& os, const SweepGrid& grid);
void write_disparity_csv(std::ostream& os, const std::vector<DisparityMeasurement>& rows);

// ---------------------------------------------------------------------------
// Plane sweep

struct PlaneSweepOptions {
  double depth_min = 1.0;
  double depth_max = 26.0;
  double step = 0.1;
  int aggregation_radius = 2;        ///< box window (2r+1)^2 over the variance
  int min_views = 3;                 ///< pixels seen by fewer frames are invalid
  std::optional<double> reference_x; ///< defaults to the frame nearest the path center
};

struct DepthMap {
  ImageF depth;                 ///< winning hypothesis, distance from the aperture plane
  ImageF score;                 ///< 1 / (1 + aggregated variance); 0 when invalid
  Image<std::uint8_t> valid;
  Pose reference;
  CameraIntrinsics intrinsics;
  double depth_min = 0.0;
  double depth_max = 0.0;
  double step = 0.0;
};

/// Registers every frame to each depth hypothesis and keeps, per pixel, the
/// hypothesis with the lowest cross-frame variance.
DepthMap plane_sweep_depth(const ScanStack& stack, const PlaneSweepOptions& options);

struct FootprintDepth {
  double median_depth = 0.0;
  double median_score = 0.0;
  std::size_t pixels = 0;
};

/// Median depth and score over the pixels where the reference camera sees
/// the target top.
FootprintDepth footprint_depth(const DepthMap& map, const sim::Scene& scene, std::size_t target_index);

/// Median score over valid pixels outside every target footprint.
double baseline_confidence(const DepthMap& map, const sim::Scene& scene);

/// A footprint scoring below this fraction of the baseline confidence counts
/// as unlocalized even when its depth happens to be close.
inline constexpr double kLocalizationConfidenceRatio = 0.5;

struct TargetLocalization {
  double true_height = 0.0;
  double estimated_height = 0.0;  ///< reference altitude minus footprint median depth
  double height_error = 0.0;
  double median_score = 0.0;
  double baseline_score = 0.0;
  std::size_t pixels = 0;
  bool localized = false;
};

TargetLocalization localize_target(const DepthMap& map, const sim::Scene& scene, std::size_t target_index,
                                   double tolerance = 0.3);

}  // namespace aos::metrics
