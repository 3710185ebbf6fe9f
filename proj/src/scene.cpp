#include "aos/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "aos/error.hpp"

namespace aos::sim {

namespace {

std::uint64_t splitmix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double lattice(std::int64_t ix, std::int64_t iy, std::uint64_t seed) noexcept {
  const std::uint64_t h =
      splitmix(seed ^ splitmix(static_cast<std::uint64_t>(ix) ^ splitmix(static_cast<std::uint64_t>(iy) + 0x632be59bd9b4e019ULL)));
  return static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

double smooth(double t) noexcept { return t * t * (3.0 - 2.0 * t); }

double octave(double x, double y, std::uint64_t seed) noexcept {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const auto ix = static_cast<std::int64_t>(fx);
  const auto iy = static_cast<std::int64_t>(fy);
  const double tx = smooth(x - fx);
  const double ty = smooth(y - fy);
  const double v00 = lattice(ix, iy, seed);
  const double v10 = lattice(ix + 1, iy, seed);
  const double v01 = lattice(ix, iy + 1, seed);
  const double v11 = lattice(ix + 1, iy + 1, seed);
  const double top = v00 + (v10 - v00) * tx;
  const double bottom = v01 + (v11 - v01) * tx;
  return top + (bottom - top) * ty;
}

// Uniform double in [0, 1) from the raw 64-bit engine output; portable
// across standard libraries, unlike std::uniform_real_distribution.
double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t target_seed(std::uint64_t seed, std::size_t index) noexcept {
  return splitmix(seed ^ (0xa0761d6478bd642fULL * (index + 1)));
}

}  // namespace

double value_noise(double x, double y, std::uint64_t seed) noexcept {
  return (octave(x, y, seed) + 0.5 * octave(2.0 * x, 2.0 * y, seed + 1)) / 1.5;
}

bool Footprint::contains(double dx, double dy) const noexcept {
  if (shape == FootprintShape::disc) return dx * dx + dy * dy <= radius * radius;
  return std::abs(dx) <= half_x && std::abs(dy) <= half_y;
}

void SceneSpec::validate() const {
  if (!(extent_x > 0.0 && extent_y > 0.0)) throw ValidationError("scene extent must be positive");
  if (!(ground_noise_scale > 0.0)) throw ValidationError("ground noise scale must be positive");
  if (ground_noise_amp < 0.0 || ground_temp - ground_noise_amp < 0.0) {
    throw ValidationError("ground radiance must stay non-negative (ground_temp >= ground_noise_amp >= 0)");
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const TargetSpec& t = targets[i];
    const std::string name = "target " + std::to_string(i);
    if (t.x < 0.0 || t.x > extent_x || t.y < 0.0 || t.y > extent_y) {
      throw ValidationError(name + " lies outside the scene extent");
    }
    if (t.height < 0.0) throw ValidationError(name + " height must be >= 0");
    const Footprint& f = t.footprint;
    const bool positive = f.shape == FootprintShape::disc ? f.radius > 0.0 : (f.half_x > 0.0 && f.half_y > 0.0);
    if (!positive) throw ValidationError(name + " footprint must be positive");
    if (t.texture_amp < 0.0 || t.temp - t.texture_amp < 0.0) {
      throw ValidationError(name + " radiance must stay non-negative");
    }
  }
  const OccluderLayerSpec& o = occluder_layer;
  if (o.density < 0.0) throw ValidationError("occluder density must be >= 0");
  if (o.density > 0.0) {
    if (!(o.crown_radius > 0.0)) throw ValidationError("crown radius must be positive");
    if (o.crown_radius_jitter < 0.0 || o.crown_height_jitter < 0.0) {
      throw ValidationError("crown jitter must be >= 0");
    }
    if (o.crown_height - o.crown_height_jitter < 0.0) throw ValidationError("crown height must be >= 0");
  }
  if (o.temp < 0.0) throw ValidationError("occluder radiance must be >= 0");
  for (const OccluderDisc& d : occluders) {
    if (!(d.radius > 0.0) || d.height < 0.0 || d.temp < 0.0) {
      throw ValidationError("explicit occluder needs radius > 0, height >= 0, radiance >= 0");
    }
  }
}

Scene::Scene(SceneSpec spec, std::vector<OccluderDisc> occluders)
    : spec_(std::move(spec)), occluders_(std::move(occluders)) {
  if (occluders_.empty()) return;

  double x0 = std::numeric_limits<double>::infinity();
  double y0 = x0;
  double x1 = -x0;
  double y1 = -x0;
  double max_r = 0.0;
  min_occ_height_ = std::numeric_limits<double>::infinity();
  max_occ_height_ = -min_occ_height_;
  for (const OccluderDisc& d : occluders_) {
    x0 = std::min(x0, d.x - d.radius);
    y0 = std::min(y0, d.y - d.radius);
    x1 = std::max(x1, d.x + d.radius);
    y1 = std::max(y1, d.y + d.radius);
    max_r = std::max(max_r, d.radius);
    min_occ_height_ = std::min(min_occ_height_, d.height);
    max_occ_height_ = std::max(max_occ_height_, d.height);
  }
  cell_ = std::max({1.0, max_r, std::max(x1 - x0, y1 - y0) / 1024.0});
  grid_x0_ = x0;
  grid_y0_ = y0;
  grid_w_ = static_cast<int>(std::floor((x1 - x0) / cell_)) + 1;
  grid_h_ = static_cast<int>(std::floor((y1 - y0) / cell_)) + 1;
  cells_.assign(static_cast<std::size_t>(grid_w_) * static_cast<std::size_t>(grid_h_), {});
  for (std::size_t i = 0; i < occluders_.size(); ++i) {
    const OccluderDisc& d = occluders_[i];
    const int cx0 = static_cast<int>(std::floor((d.x - d.radius - x0) / cell_));
    const int cx1 = std::min(grid_w_ - 1, static_cast<int>(std::floor((d.x + d.radius - x0) / cell_)));
    const int cy0 = static_cast<int>(std::floor((d.y - d.radius - y0) / cell_));
    const int cy1 = std::min(grid_h_ - 1, static_cast<int>(std::floor((d.y + d.radius - y0) / cell_)));
    for (int cy = std::max(cy0, 0); cy <= cy1; ++cy) {
      for (int cx = std::max(cx0, 0); cx <= cx1; ++cx) {
        cells_[static_cast<std::size_t>(cy) * grid_w_ + cx].push_back(static_cast<std::uint32_t>(i));
      }
    }
  }
}

template <typename Visit>
void Scene::for_candidates(double xa, double ya, double xb, double yb, Visit&& visit) const {
  if (cells_.empty()) return;
  const double lo_x = std::min(xa, xb);
  const double hi_x = std::max(xa, xb);
  const double lo_y = std::min(ya, yb);
  const double hi_y = std::max(ya, yb);
  const int cx0 = std::max(0, static_cast<int>(std::floor((lo_x - grid_x0_) / cell_)));
  const int cx1 = std::min(grid_w_ - 1, static_cast<int>(std::floor((hi_x - grid_x0_) / cell_)));
  const int cy0 = std::max(0, static_cast<int>(std::floor((lo_y - grid_y0_) / cell_)));
  const int cy1 = std::min(grid_h_ - 1, static_cast<int>(std::floor((hi_y - grid_y0_) / cell_)));
  for (int cy = cy0; cy <= cy1; ++cy) {
    for (int cx = cx0; cx <= cx1; ++cx) {
      for (std::uint32_t i : cells_[static_cast<std::size_t>(cy) * grid_w_ + cx]) visit(occluders_[i]);
    }
  }
}

double Scene::ground_radiance(double x, double y) const noexcept {
  if (spec_.ground_noise_amp == 0.0) return spec_.ground_temp;
  const double s = spec_.ground_noise_scale;
  return spec_.ground_temp + spec_.ground_noise_amp * value_noise(x / s, y / s, spec_.seed);
}

double Scene::target_radiance(std::size_t target, double x, double y) const noexcept {
  const TargetSpec& t = spec_.targets[target];
  if (t.texture_amp == 0.0) return t.temp;
  const double s = spec_.ground_noise_scale;
  return t.temp + t.texture_amp * value_noise(x / s, y / s, target_seed(spec_.seed, target));
}

double Scene::max_surface_height() const noexcept {
  double h = occluders_.empty() ? 0.0 : max_occ_height_;
  for (const TargetSpec& t : spec_.targets) h = std::max(h, t.height);
  return h;
}

double Scene::trace(const Pose& origin, double dx, double dy) const noexcept {
  double best_height = -std::numeric_limits<double>::infinity();
  double radiance = 0.0;
  bool hit = false;

  if (!occluders_.empty()) {
    const double t_lo = origin.z - max_occ_height_;
    const double t_hi = origin.z - min_occ_height_;
    for_candidates(origin.x + dx * t_lo, origin.y + dy * t_lo, origin.x + dx * t_hi,
                   origin.y + dy * t_hi, [&](const OccluderDisc& d) {
                     if (d.height <= best_height) return;
                     const double t = origin.z - d.height;
                     const double ex = origin.x + dx * t - d.x;
                     const double ey = origin.y + dy * t - d.y;
                     if (ex * ex + ey * ey <= d.radius * d.radius) {
                       best_height = d.height;
                       radiance = d.temp;
                       hit = true;
                     }
                   });
  }

  for (std::size_t i = 0; i < spec_.targets.size(); ++i) {
    const TargetSpec& tg = spec_.targets[i];
    if (tg.height <= best_height) continue;
    const double t = origin.z - tg.height;
    const double px = origin.x + dx * t;
    const double py = origin.y + dy * t;
    if (tg.footprint.contains(px - tg.x, py - tg.y)) {
      best_height = tg.height;
      radiance = target_radiance(i, px, py);
      hit = true;
    }
  }

  if (hit) return radiance;
  return ground_radiance(origin.x + dx * origin.z, origin.y + dy * origin.z);
}

bool Scene::blocked(double from_x, double from_y, double from_z, const Pose& camera,
                    std::optional<std::size_t> ignore_target) const noexcept {
  const double rise = camera.z - from_z;
  if (rise <= 0.0) return false;
  const double sx = (camera.x - from_x) / rise;
  const double sy = (camera.y - from_y) / rise;
  bool found = false;

  if (!occluders_.empty() && max_occ_height_ > from_z) {
    const double z_lo = std::max(min_occ_height_, from_z);
    const double z_hi = std::min(max_occ_height_, camera.z);
    for_candidates(from_x + sx * (z_lo - from_z), from_y + sy * (z_lo - from_z),
                   from_x + sx * (z_hi - from_z), from_y + sy * (z_hi - from_z),
                   [&](const OccluderDisc& d) {
                     if (found || d.height <= from_z || d.height >= camera.z) return;
                     const double ex = from_x + sx * (d.height - from_z) - d.x;
                     const double ey = from_y + sy * (d.height - from_z) - d.y;
                     if (ex * ex + ey * ey <= d.radius * d.radius) found = true;
                   });
    if (found) return true;
  }

  for (std::size_t i = 0; i < spec_.targets.size(); ++i) {
    if (ignore_target && *ignore_target == i) continue;
    const TargetSpec& tg = spec_.targets[i];
    if (tg.height <= from_z || tg.height >= camera.z) continue;
    const double px = from_x + sx * (tg.height - from_z);
    const double py = from_y + sy * (tg.height - from_z);
    if (tg.footprint.contains(px - tg.x, py - tg.y)) return true;
  }
  return false;
}

Scene generate_scene(const SceneSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const OccluderLayerSpec& layer = spec.occluder_layer;
  std::vector<OccluderDisc> occluders;

  if (layer.density > 0.0) {
    // Poisson count from unit-rate exponential inter-arrival times.
    const double mean = layer.density * spec.extent_x * spec.extent_y;
    std::size_t count = 0;
    double arrival = -std::log1p(-uniform(rng));
    while (arrival <= mean) {
      ++count;
      arrival += -std::log1p(-uniform(rng));
    }
    occluders.reserve(count + spec.occluders.size());
    for (std::size_t i = 0; i < count; ++i) {
      OccluderDisc d;
      d.x = uniform(rng) * spec.extent_x;
      d.y = uniform(rng) * spec.extent_y;
      d.height = layer.crown_height + (2.0 * uniform(rng) - 1.0) * layer.crown_height_jitter;
      d.radius = std::max(0.01, layer.crown_radius + (2.0 * uniform(rng) - 1.0) * layer.crown_radius_jitter);
      d.temp = layer.temp;
      occluders.push_back(d);
    }
  }
  occluders.insert(occluders.end(), spec.occluders.begin(), spec.occluders.end());
  return Scene(spec, std::move(occluders));
}

Frame render_frame(const Scene& scene, const Pose& pose, const CameraIntrinsics& intrinsics) {
  intrinsics.validate();
  if (!(pose.z > scene.max_surface_height())) {
    throw ValidationError("camera altitude " + std::to_string(pose.z) +
                          " m must exceed every scene surface (highest " +
                          std::to_string(scene.max_surface_height()) + " m)");
  }
  Frame frame{ImageF(intrinsics.width, intrinsics.height), pose, intrinsics};
  const double f = intrinsics.focal_px();
  const double cx = intrinsics.cx();
  const double cy = intrinsics.cy();
  const int height = intrinsics.height;
  const int width = intrinsics.width;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < height; ++j) {
    auto row = frame.image.row(j);
    const double dy = (j - cy) / f;
    for (int i = 0; i < width; ++i) {
      row[i] = static_cast<float>(scene.trace(pose, (i - cx) / f, dy));
    }
  }
  return frame;
}

std::size_t ScanPath::frame_count() const {
  validate();
  return static_cast<std::size_t>(std::floor(length / spacing + 1e-9)) + 1;
}

void ScanPath::validate() const {
  if (!(spacing > 0.0)) throw ValidationError("scan spacing must be positive");
  if (!(length >= 0.0) || !std::isfinite(length)) throw ValidationError("scan length must be >= 0");
  if (!(altitude > 0.0)) throw ValidationError("scan altitude must be positive");
}

ScanStack render_scan(const Scene& scene, const ScanPath& path, const CameraIntrinsics& intrinsics) {
  const std::size_t n = path.frame_count();
  std::vector<Frame> frames(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Pose pose{path.x_start + static_cast<double>(i) * path.spacing, path.y, path.altitude};
    frames[i] = render_frame(scene, pose, intrinsics);
  }
  return ScanStack(std::move(frames));
}

double ground_truth_visibility(const Scene& scene, const Pose& pose, std::size_t target_index,
                               int samples_per_axis) {
  if (target_index >= scene.targets().size()) {
    throw ValidationError("target index " + std::to_string(target_index) + " out of range");
  }
  if (samples_per_axis < 1) throw ValidationError("need at least one sample per axis");
  const TargetSpec& t = scene.targets()[target_index];
  const double bx = t.footprint.bound_x();
  const double by = t.footprint.bound_y();
  int total = 0;
  int visible = 0;
  for (int sy = 0; sy < samples_per_axis; ++sy) {
    const double oy = ((sy + 0.5) / samples_per_axis * 2.0 - 1.0) * by;
    for (int sx = 0; sx < samples_per_axis; ++sx) {
      const double ox = ((sx + 0.5) / samples_per_axis * 2.0 - 1.0) * bx;
      if (!t.footprint.contains(ox, oy)) continue;
      ++total;
      if (!scene.blocked(t.x + ox, t.y + oy, t.height, pose, target_index)) ++visible;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(visible) / total;
}

namespace {

TargetSpec box_target(double x, double y, double height, double half_x, double half_y, double temp) {
  TargetSpec t;
  t.x = x;
  t.y = y;
  t.height = height;
  t.footprint.shape = FootprintShape::box;
  t.footprint.half_x = half_x;
  t.footprint.half_y = half_y;
  t.temp = temp;
  return t;
}

OccluderLayerSpec forest(double density) {
  OccluderLayerSpec layer;
  layer.density = density;
  layer.crown_height = 21.0;
  layer.crown_height_jitter = 0.5;
  layer.crown_radius = 0.25;
  layer.crown_radius_jitter = 0.1;
  layer.temp = 8.0;
  return layer;
}

}  // namespace

SceneSpec preset(int number, std::uint64_t seed) {
  SceneSpec spec;
  spec.seed = seed;
  const double cx = spec.extent_x / 2.0;
  const double cy = spec.extent_y / 2.0;
  const TargetSpec standing = box_target(cx, cy, 1.8, 0.5, 0.5, 32.0);
  const TargetSpec lying = box_target(cx, cy + 4.5, 0.3, 0.9, 0.3, 31.0);
  switch (number) {
    case 1:
      spec.targets = {standing, lying};
      break;
    case 2:
      spec.targets = {box_target(cx, cy, 1.8, 0.9, 0.25, 32.0)};
      spec.occluder_layer = forest(1.4);
      break;
    case 3:
      spec.targets = {standing, lying};
      spec.occluder_layer = forest(2.1);
      break;
    case 4:
      spec.targets = {standing, box_target(cx, cy + 4.5, 0.3, 0.5, 0.5, 32.0)};
      spec.occluder_layer = forest(0.9);
      break;
    default:
      throw ValidationError("unknown scene preset " + std::to_string(number) + " (expected 1-4)");
  }
  return spec;
}

std::optional<SceneSpec> preset_by_name(const std::string& name, std::uint64_t seed) {
  std::string digits = name;
  if (digits.rfind("preset", 0) == 0) digits = digits.substr(6);
  if (digits.size() == 1 && digits[0] >= '1' && digits[0] <= '4') return preset(digits[0] - '0', seed);
  return std::nullopt;
}

ScanPath default_path(const SceneSpec& spec) {
  ScanPath path;
  path.length = 14.0;
  path.spacing = 0.5;
  path.altitude = 26.0;
  path.x_start = spec.extent_x / 2.0 - path.length / 2.0;
  path.y = spec.extent_y / 2.0;
  return path;
}

}  // namespace aos::sim
