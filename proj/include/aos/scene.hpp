#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aos/camera.hpp"
#include "aos/scan_stack.hpp"

namespace aos::sim {

enum class FootprintShape { disc, box };

/// Horizontal extent of a target's top surface, centered on the target.
struct Footprint {
  FootprintShape shape = FootprintShape::disc;
  double radius = 0.5;  ///< disc only
  double half_x = 0.5;  ///< box only
  double half_y = 0.5;  ///< box only

  bool contains(double dx, double dy) const noexcept;
  /// Half extents of the axis-aligned bounding box.
  double bound_x() const noexcept { return shape == FootprintShape::disc ? radius : half_x; }
  double bound_y() const noexcept { return shape == FootprintShape::disc ? radius : half_y; }

  friend bool operator==(const Footprint&, const Footprint&) = default;
};

struct TargetSpec {
  double x = 0.0;
  double y = 0.0;
  double height = 0.0;  ///< h_t, top surface above ground
  Footprint footprint;
  double temp = 32.0;
  double texture_amp = 1.5;  ///< value-noise amplitude on the top surface

  friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

/// Poisson field of opaque horizontal discs (tree crowns).
struct OccluderLayerSpec {
  double density = 0.0;  ///< discs per square meter
  double crown_height = 21.0;
  double crown_height_jitter = 0.0;  ///< uniform +/- jitter
  double crown_radius = 1.5;
  double crown_radius_jitter = 0.0;
  double temp = 8.0;

  friend bool operator==(const OccluderLayerSpec&, const OccluderLayerSpec&) = default;
};

struct OccluderDisc {
  double x = 0.0;
  double y = 0.0;
  double height = 21.0;
  double radius = 1.0;
  double temp = 8.0;

  friend bool operator==(const OccluderDisc&, const OccluderDisc&) = default;
};

struct SceneSpec {
  double extent_x = 40.0;
  double extent_y = 40.0;
  double ground_temp = 15.0;
  double ground_noise_amp = 2.0;
  double ground_noise_scale = 0.25;  ///< meters per noise lattice cell
  std::vector<TargetSpec> targets;
  OccluderLayerSpec occluder_layer;
  std::vector<OccluderDisc> occluders;  ///< placed in addition to the Poisson layer
  std::uint64_t seed = 1;

  void validate() const;

  friend bool operator==(const SceneSpec&, const SceneSpec&) = default;
};

/// Generated world: the spec plus every concrete occluder disc.
/// Immutable after construction; holds a spatial index over the occluders.
class Scene {
 public:
  Scene(SceneSpec spec, std::vector<OccluderDisc> occluders);

  const SceneSpec& spec() const noexcept { return spec_; }
  const std::vector<TargetSpec>& targets() const noexcept { return spec_.targets; }
  const std::vector<OccluderDisc>& occluders() const noexcept { return occluders_; }

  double ground_radiance(double x, double y) const noexcept;
  double target_radiance(std::size_t target, double x, double y) const noexcept;
  /// Highest surface height (occluders and targets); 0 for bare ground.
  double max_surface_height() const noexcept;

  /// Radiance of the first surface hit by a nadir-ish ray leaving `origin`
  /// downward with horizontal slope (dx, dy) per meter of descent.
  double trace(const Pose& origin, double dx, double dy) const noexcept;

  /// True if any surface strictly above `from_z` blocks the straight segment
  /// from (from_x, from_y, from_z) up to `camera`.
  bool blocked(double from_x, double from_y, double from_z, const Pose& camera,
               std::optional<std::size_t> ignore_target = std::nullopt) const noexcept;

  friend bool operator==(const Scene& a, const Scene& b) {
    return a.spec_ == b.spec_ && a.occluders_ == b.occluders_;
  }

 private:
  template <typename Visit>
  void for_candidates(double x0, double y0, double x1, double y1, Visit&& visit) const;

  SceneSpec spec_;
  std::vector<OccluderDisc> occluders_;
  // uniform grid over occluder bounding boxes
  double grid_x0_ = 0.0;
  double grid_y0_ = 0.0;
  double cell_ = 1.0;
  int grid_w_ = 0;
  int grid_h_ = 0;
  std::vector<std::vector<std::uint32_t>> cells_;
  double min_occ_height_ = 0.0;
  double max_occ_height_ = 0.0;
};

/// Linear constant-altitude flight path along x.
struct ScanPath {
  double x_start = 13.0;
  double length = 14.0;
  double spacing = 0.5;
  double altitude = 26.0;
  double y = 20.0;

  /// floor(length / spacing) + 1
  std::size_t frame_count() const;
  void validate() const;
};

Scene generate_scene(const SceneSpec& spec);

Frame render_frame(const Scene& scene, const Pose& pose, const CameraIntrinsics& intrinsics);

ScanStack render_scan(const Scene& scene, const ScanPath& path, const CameraIntrinsics& intrinsics);

/// Fraction of target top-surface sample points (n x n grid over the
/// footprint) with an unobstructed line of sight to the camera.
double ground_truth_visibility(const Scene& scene, const Pose& pose, std::size_t target_index,
                               int samples_per_axis = 9);

/// Deterministic value noise in [-1, 1], two octaves, world-anchored.
double value_noise(double x, double y, std::uint64_t seed) noexcept;

/// Presets 1-4 mirroring the four field scenes: 1 open field (standing and
/// lying person), 2 forest with one standing person (arms outstretched),
/// 3 dense forest (standing and lying), 4 sparse forest (standing person and
/// a 0.3 m object). Occluded presets use crowns at 21 m.
SceneSpec preset(int number, std::uint64_t seed = 1);
/// Accepts "preset1".."preset4" or "1".."4".
std::optional<SceneSpec> preset_by_name(const std::string& name, std::uint64_t seed = 1);

/// Default flight path for a scene: 14 m at 0.5 m spacing, 26 m AGL,
/// centered on the scene.
ScanPath default_path(const SceneSpec& spec);

}  // namespace aos::sim
