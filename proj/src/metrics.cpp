#include "aos/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "aos/error.hpp"
#include "registration.hpp"

namespace aos::metrics {

namespace {

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bool covered(const Image<std::uint16_t>* coverage, int x, int y) {
  return coverage == nullptr || coverage->at(x, y) > 0;
}

struct WindowStats {
  double mean = 0.0;
  double norm = 0.0;  // sqrt(sum of squared deviations)
};

// Zero-mean NCC between `region` of left and the same region shifted by
// `shift` columns in right. nullopt if the shifted window leaves the image
// or touches uncovered pixels.
std::optional<double> ncc_at(const ImageF& left, const ImageF& right, const PixelRect& region,
                             const WindowStats& tmpl, int shift, const Image<std::uint16_t>* right_cov) {
  const PixelRect cand = region.translated(shift, 0);
  if (!cand.inside(right)) return std::nullopt;
  double sum = 0.0;
  for (int y = cand.y; y < cand.bottom(); ++y) {
    for (int x = cand.x; x < cand.right(); ++x) {
      if (!covered(right_cov, x, y)) return std::nullopt;
      sum += right.at(x, y);
    }
  }
  const double n = static_cast<double>(region.width) * region.height;
  const double mean = sum / n;
  double cross = 0.0;
  double sq = 0.0;
  for (int y = 0; y < region.height; ++y) {
    for (int x = 0; x < region.width; ++x) {
      const double l = left.at(region.x + x, region.y + y) - tmpl.mean;
      const double r = right.at(cand.x + x, cand.y + y) - mean;
      cross += l * r;
      sq += r * r;
    }
  }
  if (sq <= 0.0) return 0.0;
  return cross / (tmpl.norm * std::sqrt(sq));
}

// Inverse of the registered projection: pixel -> world point on the plane at
// the target's top height, for a target seen from viewpoint_x and drawn into
// the grid of `grid_pose` registered at `focal_distance`.
Image<std::uint8_t> mask_for(const sim::Scene& scene, std::size_t target_index, const CameraIntrinsics& intr,
                             const Pose& grid_pose, double viewpoint_x, double focal_distance) {
  if (target_index >= scene.targets().size()) {
    throw ValidationError("target index " + std::to_string(target_index) + " out of range");
  }
  const sim::TargetSpec& t = scene.targets()[target_index];
  const double f = intr.focal_px();
  const double depth = grid_pose.z - t.height;
  const double register_shift = f * (grid_pose.x - viewpoint_x) / focal_distance;
  Image<std::uint8_t> mask(intr.width, intr.height, 0);
  for (int j = 0; j < intr.height; ++j) {
    const double wy = grid_pose.y + (j - intr.cy()) * depth / f;
    for (int i = 0; i < intr.width; ++i) {
      const double wx = viewpoint_x + (i - intr.cx() + register_shift) * depth / f;
      if (t.footprint.contains(wx - t.x, wy - t.y)) mask.at(i, j) = 1;
    }
  }
  return mask;
}

PixelRect bounding_rect(const Image<std::uint8_t>& mask) {
  int x0 = mask.width(), y0 = mask.height(), x1 = -1, y1 = -1;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) return {};
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace

DisparityMeasurement match_horizontal(const ImageF& left, const ImageF& right, const PixelRect& region,
                                      const BlockMatchOptions& options,
                                      const Image<std::uint16_t>* left_coverage,
                                      const Image<std::uint16_t>* right_coverage) {
  if (!region.inside(left) || !region.inside(right)) {
    throw ValidationError("matching region lies outside the images");
  }
  if (options.max_disparity < 1) throw ValidationError("max disparity must be >= 1 px");

  DisparityMeasurement m;
  m.region = region;

  WindowStats tmpl;
  double sum = 0.0;
  for (int y = region.y; y < region.bottom(); ++y) {
    for (int x = region.x; x < region.right(); ++x) {
      if (!covered(left_coverage, x, y)) throw ValidationError("matching region contains uncovered pixels");
      sum += left.at(x, y);
    }
  }
  const double n = static_cast<double>(region.width) * region.height;
  tmpl.mean = sum / n;
  double sq = 0.0;
  for (int y = region.y; y < region.bottom(); ++y) {
    for (int x = region.x; x < region.right(); ++x) {
      const double d = left.at(x, y) - tmpl.mean;
      sq += d * d;
    }
  }
  tmpl.norm = std::sqrt(sq);
  if (std::sqrt(sq / n) < options.min_texture_std) return m;  // textureless

  const int range = options.max_disparity;
  std::vector<std::optional<double>> scores(static_cast<std::size_t>(2 * range + 1));
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int s = -range; s <= range; ++s) {
    auto score = ncc_at(left, right, region, tmpl, s, right_coverage);
    scores[static_cast<std::size_t>(s + range)] = score;
    if (score && *score > best_score) {
      best_score = *score;
      best = s;
    }
  }
  if (!std::isfinite(best_score)) return m;

  double sub = 0.0;
  if (best > -range && best < range) {
    const auto& lo = scores[static_cast<std::size_t>(best - 1 + range)];
    const auto& hi = scores[static_cast<std::size_t>(best + 1 + range)];
    if (lo && hi) {
      const double denom = *lo - 2.0 * best_score + *hi;
      if (denom < 0.0) sub = std::clamp(0.5 * (*lo - *hi) / denom, -0.5, 0.5);
    }
  }
  m.confidence = std::clamp(best_score, 0.0, 1.0);
  if (m.confidence > 0.0) m.disparity_px = best + sub;
  return m;
}

DisparityMeasurement measured_disparity(const integral::StereoPair& pair, const PixelRect& region,
                                        const BlockMatchOptions& options,
                                        const perception::DisplayModel& display) {
  DisparityMeasurement m = match_horizontal(pair.left.image, pair.right.image, region, options,
                                            &pair.left.coverage, &pair.right.coverage);
  if (m.disparity_px) {
    const double width = pair.left.intrinsics.width;
    const double meters_per_px =
        2.0 * display.image_distance * std::tan(display.fov_deg * std::numbers::pi / 360.0) / width;
    m.disparity_arcmin = display.arcmin(*m.disparity_px * meters_per_px);
  }
  return m;
}

double expected_disparity_px(double focal_px, double baseline, double focal_distance, double target_height) {
  return focal_px * baseline * (1.0 / (focal_distance - target_height) - 1.0 / focal_distance);
}

Image<std::uint8_t> target_mask(const sim::Scene& scene, std::size_t target_index,
                                const integral::IntegralImage& integral, double viewpoint_x) {
  return mask_for(scene, target_index, integral.intrinsics, integral.grid_pose, viewpoint_x,
                  integral.params.focal_distance);
}

PixelRect target_rect(const sim::Scene& scene, std::size_t target_index,
                      const integral::IntegralImage& integral, double viewpoint_x, int shrink) {
  return bounding_rect(target_mask(scene, target_index, integral, viewpoint_x)).shrunk(shrink);
}

Image<std::uint8_t> target_core_mask(const sim::Scene& scene, std::size_t target_index,
                                     const integral::IntegralImage& integral, int margin) {
  const auto& p = integral.params;
  const auto lo = mask_for(scene, target_index, integral.intrinsics, integral.grid_pose, p.window_lo(),
                           p.focal_distance);
  const auto hi = mask_for(scene, target_index, integral.intrinsics, integral.grid_pose, p.window_hi(),
                           p.focal_distance);
  Image<std::uint8_t> core(lo.width(), lo.height(), 0);
  for (int y = 0; y < core.height(); ++y) {
    for (int x = 0; x < core.width(); ++x) {
      bool inside = true;
      for (int dy = -margin; dy <= margin && inside; ++dy) {
        for (int dx = -margin; dx <= margin && inside; ++dx) {
          const int xx = x + dx;
          const int yy = y + dy;
          inside = lo.contains(xx, yy) && lo.at(xx, yy) && hi.at(xx, yy);
        }
      }
      core.at(x, y) = inside ? 1 : 0;
    }
  }
  return core;
}

PixelRect target_context_rect(const sim::Scene& scene, std::size_t target_index,
                              const integral::IntegralImage& integral) {
  const PixelRect r = target_rect(scene, target_index, integral, integral.params.viewpoint);
  if (r.empty()) throw ValidationError("target is not visible in the integral image");
  const int grow = std::max(r.width, r.height) / 2;
  const int x0 = std::max(0, r.x - grow);
  const int y0 = std::max(0, r.y - grow);
  const int x1 = std::min(integral.image.width(), r.right() + grow);
  const int y1 = std::min(integral.image.height(), r.bottom() + grow);
  return {x0, y0, x1 - x0, y1 - y0};
}

PixelRect target_core_rect(const sim::Scene& scene, std::size_t target_index,
                           const integral::IntegralImage& integral, int shrink) {
  const auto& p = integral.params;
  auto lo = mask_for(scene, target_index, integral.intrinsics, integral.grid_pose, p.window_lo(), p.focal_distance);
  const auto hi =
      mask_for(scene, target_index, integral.intrinsics, integral.grid_pose, p.window_hi(), p.focal_distance);
  bool any = false;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    lo.pixels()[i] = lo.pixels()[i] && hi.pixels()[i];
    any = any || lo.pixels()[i];
  }
  if (any) {
    const PixelRect core = bounding_rect(lo).shrunk(shrink);
    if (!core.empty()) return core;
  }
  return target_rect(scene, target_index, integral, p.viewpoint, shrink + 1);
}

Contrast contrast_metric(const ImageF& image, const PixelRect& region, const Image<std::uint16_t>* coverage) {
  if (region.empty()) throw ValidationError("contrast region is empty");
  if (!region.inside(image)) throw ValidationError("contrast region lies outside the image");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t n = 0;
  for (int y = region.y; y < region.bottom(); ++y) {
    for (int x = region.x; x < region.right(); ++x) {
      if (!covered(coverage, x, y)) continue;
      const double v = image.at(x, y);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
      sum_sq += v * v;
      ++n;
    }
  }
  if (n == 0) throw ValidationError("contrast region has no covered pixels");
  Contrast c;
  const double mean = sum / static_cast<double>(n);
  c.rms = std::sqrt(std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean));
  if (hi + lo != 0.0) c.michelson = (hi - lo) / (hi + lo);
  return c;
}

Contrast contrast_metric(const integral::IntegralImage& integral, const PixelRect& region) {
  return contrast_metric(integral.image, region, &integral.coverage);
}

RivalryReference rivalry_reference(const sim::Scene& scene) {
  RivalryReference ref;
  ref.ground_radiance = scene.spec().ground_temp;
  if (scene.occluders().empty()) {
    ref.occluder_radiance = scene.spec().occluder_layer.temp;
  } else {
    double sum = 0.0;
    for (const auto& d : scene.occluders()) sum += d.temp;
    ref.occluder_radiance = sum / static_cast<double>(scene.occluders().size());
  }
  return ref;
}

double rivalry_score(const integral::StereoPair& pair, const RivalryReference& reference) {
  const ImageF& l = pair.left.image;
  const ImageF& r = pair.right.image;
  if (l.width() != r.width() || l.height() != r.height()) {
    throw ValidationError("stereo pair eyes have mismatched dimensions");
  }
  const auto lc = pair.left.coverage.pixels();
  const auto rc = pair.right.coverage.pixels();
  const auto lp = l.pixels();
  const auto rp = r.pixels();
  const auto occluder_like = [&](double v) {
    return std::abs(v - reference.occluder_radiance) < std::abs(v - reference.ground_radiance);
  };
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double diff = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < lp.size(); ++i) {
    if (!lc[i] || !rc[i]) continue;
    const double a = lp[i];
    const double b = rp[i];
    lo = std::min({lo, a, b});
    hi = std::max({hi, a, b});
    if (occluder_like(a) || occluder_like(b)) {
      diff += std::abs(a - b);
      ++n;
    }
  }
  if (n == 0 || !(hi > lo)) return 0.0;
  return diff / static_cast<double>(n) / (hi - lo);
}

double occlusion_suppression_score(const integral::IntegralImage& integral, const sim::Scene* ground_truth,
                                   std::size_t target_index) {
  if (ground_truth == nullptr) {
    throw UnsupportedError("occlusion suppression needs scene ground truth (not available for imported stacks)");
  }
  auto mask = target_core_mask(*ground_truth, target_index, integral, 1);
  if (std::none_of(mask.pixels().begin(), mask.pixels().end(), [](std::uint8_t m) { return m != 0; })) {
    mask = target_mask(*ground_truth, target_index, integral, integral.params.viewpoint);
  }
  const double target = ground_truth->targets()[target_index].temp;
  const double occluder = rivalry_reference(*ground_truth).occluder_radiance;
  std::size_t total = 0;
  std::size_t clear = 0;
  const auto m = mask.pixels();
  const auto cov = integral.coverage.pixels();
  const auto px = integral.image.pixels();
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!m[i] || !cov[i]) continue;
    ++total;
    if (std::abs(px[i] - target) < std::abs(px[i] - occluder)) ++clear;
  }
  if (total == 0) throw ValidationError("target footprint is not visible in the integral image");
  return static_cast<double>(clear) / static_cast<double>(total);
}

std::string to_string(SweepMetric metric) {
  switch (metric) {
    case SweepMetric::confidence: return "confidence";
    case SweepMetric::rivalry: return "rivalry";
    case SweepMetric::suppression: return "suppression";
    case SweepMetric::composite: return "composite";
  }
  return "unknown";
}

std::optional<SweepMetric> parse_sweep_metric(const std::string& name) {
  for (SweepMetric m : {SweepMetric::confidence, SweepMetric::rivalry, SweepMetric::suppression,
                        SweepMetric::composite}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

namespace {

double pair_confidence(const integral::StereoPair& pair, const SweepSetup& setup) {
  PixelRect region;
  if (setup.region) {
    region = *setup.region;
  } else if (setup.ground_truth) {
    region = target_core_rect(*setup.ground_truth, setup.target_index, pair.left);
  } else {
    throw UnsupportedError("match confidence needs a region or scene ground truth");
  }
  return measured_disparity(pair, region, setup.match).confidence;
}

double pair_rivalry(const integral::StereoPair& pair, const SweepSetup& setup) {
  if (setup.reference) return rivalry_score(pair, *setup.reference);
  if (setup.ground_truth) return rivalry_score(pair, rivalry_reference(*setup.ground_truth));
  throw UnsupportedError("rivalry needs radiance references or scene ground truth");
}

double pair_suppression(const integral::StereoPair& pair, const SweepSetup& setup) {
  return 0.5 * (occlusion_suppression_score(pair.left, setup.ground_truth, setup.target_index) +
                occlusion_suppression_score(pair.right, setup.ground_truth, setup.target_index));
}

}  // namespace

double evaluate_metric(const ScanStack& stack, const SweepSetup& setup, double baseline, double aperture) {
  const auto pair = integral::stereo_pair(stack, setup.center, baseline, aperture, setup.focal_distance);
  switch (setup.metric) {
    case SweepMetric::confidence: return pair_confidence(pair, setup);
    case SweepMetric::rivalry: return pair_rivalry(pair, setup);
    case SweepMetric::suppression: return pair_suppression(pair, setup);
    case SweepMetric::composite:
      return pair_suppression(pair, setup) * pair_confidence(pair, setup) / (1.0 + pair_rivalry(pair, setup));
  }
  return 0.0;
}

std::optional<SweepGrid::Cell> SweepGrid::argmax() const {
  std::optional<Cell> best;
  for (std::size_t b = 0; b < baselines.size(); ++b) {
    for (std::size_t a = 0; a < apertures.size(); ++a) {
      const auto& v = at(b, a);
      if (v && (!best || *v > best->value)) best = Cell{b, a, *v};
    }
  }
  return best;
}

SweepGrid parameter_sweep(const ScanStack& stack, const SweepSetup& setup, const std::vector<double>& baselines,
                          const std::vector<double>& apertures) {
  if (baselines.empty() || apertures.empty()) throw ValidationError("parameter sweep needs non-empty grids");
  SweepGrid grid;
  grid.metric = to_string(setup.metric);
  grid.baselines = baselines;
  grid.apertures = apertures;
  grid.cells.resize(baselines.size() * apertures.size());
  for (std::size_t b = 0; b < baselines.size(); ++b) {
    for (std::size_t a = 0; a < apertures.size(); ++a) {
      try {
        grid.cells[b * apertures.size() + a] = evaluate_metric(stack, setup, baselines[b], apertures[a]);
      } catch (const ValidationError&) {
        // infeasible cell: e_f + a beyond the path or an empty window
      }
    }
  }
  return grid;
}

void write_sweep_csv(std::ostream& os, const SweepGrid& grid) {
  os << "metric,e_f,a,value,feasible\n";
  for (std::size_t b = 0; b < grid.baselines.size(); ++b) {
    for (std::size_t a = 0; a < grid.apertures.size(); ++a) {
      const auto& v = grid.at(b, a);
      os << grid.metric << ',' << g6(grid.baselines[b]) << ',' << g6(grid.apertures[a]) << ','
         << (v ? g6(*v) : std::string("infeasible")) << ',' << (v ? 1 : 0) << '\n';
    }
  }
}

void write_disparity_csv(std::ostream& os, const std::vector<DisparityMeasurement>& rows) {
  os << "x,y,width,height,disparity_px,disparity_arcmin,confidence\n";
  for (const auto& m : rows) {
    os << m.region.x << ',' << m.region.y << ',' << m.region.width << ',' << m.region.height << ','
       << (m.disparity_px ? g6(*m.disparity_px) : std::string("none")) << ','
       << (m.disparity_arcmin ? g6(*m.disparity_arcmin) : std::string("none")) << ',' << g6(m.confidence)
       << '\n';
  }
}

DepthMap plane_sweep_depth(const ScanStack& stack, const PlaneSweepOptions& options) {
  if (stack.size() < 3) throw ValidationError("plane sweep needs at least 3 frames");
  if (!(options.step > 0.0) || !(options.depth_min > 0.0) || !(options.depth_max >= options.depth_min) ||
      options.depth_max > stack.altitude() + 1e-9) {
    throw ValidationError("plane sweep depth range must satisfy 0 < min <= max <= altitude and step > 0",
                          "depth range (0, " + g6(stack.altitude()) + "]");
  }
  if (options.aggregation_radius < 0 || options.min_views < 1) {
    throw ValidationError("plane sweep aggregation radius must be >= 0 and min views >= 1");
  }

  const CameraIntrinsics& intr = stack.intrinsics();
  const int w = intr.width;
  const int h = intr.height;
  const double f = intr.focal_px();

  double ref_x = options.reference_x.value_or(stack.path_center());
  if (!options.reference_x) {
    // snap to the nearest sampled pose
    double best = std::numeric_limits<double>::infinity();
    for (const Frame& fr : stack.frames()) {
      const double d = std::abs(fr.pose.x - stack.path_center());
      if (d < best) {
        best = d;
        ref_x = fr.pose.x;
      }
    }
  }

  DepthMap map;
  map.intrinsics = intr;
  map.reference = Pose{ref_x, stack.y(), stack.altitude()};
  map.depth_min = options.depth_min;
  map.depth_max = options.depth_max;
  map.step = options.step;
  map.depth = ImageF(w, h, static_cast<float>(options.depth_max));
  map.score = ImageF(w, h, 0.0f);
  map.valid = Image<std::uint8_t>(w, h, 0);

  const auto hypotheses = static_cast<std::size_t>(std::floor((options.depth_max - options.depth_min) / options.step + 1e-9)) + 1;
  const std::size_t npx = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<double> sum(npx), sum_sq(npx), cost(npx), row_acc(npx);
  std::vector<std::uint16_t> count(npx);
  std::vector<double> best_cost(npx, std::numeric_limits<double>::infinity());
  const int r = options.aggregation_radius;

  for (std::size_t k = 0; k < hypotheses; ++k) {
    const double depth = options.depth_min + static_cast<double>(k) * options.step;
    std::fill(sum.begin(), sum.end(), 0.0);
    std::fill(sum_sq.begin(), sum_sq.end(), 0.0);
    std::fill(count.begin(), count.end(), std::uint16_t{0});
    for (std::size_t fi = 0; fi < stack.size(); ++fi) {
      const Frame& fr = stack.frame(fi);
      const auto shift = detail::plane_shift(f, ref_x, stack.y(), fr.pose.x, fr.pose.y, depth);
#pragma omp parallel for schedule(static)
      for (int y = 0; y < h; ++y) {
        const std::size_t base = static_cast<std::size_t>(y) * w;
        detail::register_row(fr.image, shift, stack.correction(fi), y, [&](int x, int, double v) {
          sum[base + x] += v;
          sum_sq[base + x] += v * v;
          ++count[base + x];
        });
      }
    }
    // per-pixel variance; invalid pixels get +inf
    for (std::size_t i = 0; i < npx; ++i) {
      if (count[i] < options.min_views) {
        cost[i] = std::numeric_limits<double>::infinity();
        continue;
      }
      const double mean = sum[i] / count[i];
      cost[i] = std::max(0.0, sum_sq[i] / count[i] - mean * mean);
    }
    // separable box mean over valid neighbours (inf propagates: border pixels
    // whose window touches an invalid pixel are themselves invalid)
    if (r > 0) {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          double acc = 0.0;
          for (int dx = -r; dx <= r; ++dx) {
            const int xx = std::clamp(x + dx, 0, w - 1);
            acc += cost[static_cast<std::size_t>(y) * w + xx];
          }
          row_acc[static_cast<std::size_t>(y) * w + x] = acc;
        }
      }
      const double norm = 1.0 / ((2.0 * r + 1.0) * (2.0 * r + 1.0));
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          double acc = 0.0;
          for (int dy = -r; dy <= r; ++dy) {
            const int yy = std::clamp(y + dy, 0, h - 1);
            acc += row_acc[static_cast<std::size_t>(yy) * w + x];
          }
          cost[static_cast<std::size_t>(y) * w + x] = acc * norm;
        }
      }
    }
    for (std::size_t i = 0; i < npx; ++i) {
      if (cost[i] < best_cost[i]) {
        best_cost[i] = cost[i];
        map.depth.pixels()[i] = static_cast<float>(depth);
      }
    }
  }

  for (std::size_t i = 0; i < npx; ++i) {
    if (std::isfinite(best_cost[i])) {
      map.valid.pixels()[i] = 1;
      map.score.pixels()[i] = static_cast<float>(1.0 / (1.0 + best_cost[i]));
    }
  }
  return map;
}

FootprintDepth footprint_depth(const DepthMap& map, const sim::Scene& scene, std::size_t target_index) {
  const auto mask = mask_for(scene, target_index, map.intrinsics, map.reference, map.reference.x, 1.0);
  std::vector<double> depths;
  std::vector<double> scores;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask.pixels()[i]) continue;
    if (!map.valid.pixels()[i]) {
      scores.push_back(0.0);
      continue;
    }
    depths.push_back(map.depth.pixels()[i]);
    scores.push_back(map.score.pixels()[i]);
  }
  FootprintDepth out;
  out.pixels = scores.size();
  out.median_depth = median(depths);
  out.median_score = scores.empty() ? 0.0 : median(scores);
  return out;
}

double baseline_confidence(const DepthMap& map, const sim::Scene& scene) {
  Image<std::uint8_t> any_target(map.depth.width(), map.depth.height(), 0);
  for (std::size_t t = 0; t < scene.targets().size(); ++t) {
    const auto mask = mask_for(scene, t, map.intrinsics, map.reference, map.reference.x, 1.0);
    for (std::size_t i = 0; i < mask.size(); ++i) any_target.pixels()[i] |= mask.pixels()[i];
  }
  std::vector<double> scores;
  for (std::size_t i = 0; i < any_target.size(); ++i) {
    if (!any_target.pixels()[i] && map.valid.pixels()[i]) scores.push_back(map.score.pixels()[i]);
  }
  return scores.empty() ? 0.0 : median(scores);
}

TargetLocalization localize_target(const DepthMap& map, const sim::Scene& scene, std::size_t target_index,
                                   double tolerance) {
  const FootprintDepth fp = footprint_depth(map, scene, target_index);
  TargetLocalization out;
  out.true_height = scene.targets().at(target_index).height;
  out.estimated_height = map.reference.z - fp.median_depth;
  out.height_error = out.estimated_height - out.true_height;
  out.median_score = fp.median_score;
  out.baseline_score = baseline_confidence(map, scene);
  out.pixels = fp.pixels;
  out.localized = fp.pixels > 0 && std::abs(out.height_error) <= tolerance &&
                  out.median_score >= kLocalizationConfidenceRatio * out.baseline_score;
  return out;
}

}  // namespace aos::metrics
