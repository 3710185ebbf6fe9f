#include "aos/integral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "aos/error.hpp"
#include "registration.hpp"

namespace aos::integral {

namespace {

constexpr double kWindowTolerance = 1e-9;

std::string meters(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void check_focal_distance(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw ValidationError("focal distance h must be positive, got " + meters(h));
  }
}

}  // namespace

RegisteredImage project_to_viewpoint(const Frame& frame, const Pose& virtual_pose,
                                     double focal_distance, const FrameCorrection& correction) {
  check_focal_distance(focal_distance);
  if (std::abs(frame.pose.z - virtual_pose.z) > kWindowTolerance) {
    throw ValidationError("virtual pose altitude must equal the frame altitude");
  }
  const int w = frame.image.width();
  const int h = frame.image.height();
  RegisteredImage out{ImageF(w, h), Image<std::uint8_t>(w, h, 0)};
  const auto shift = detail::plane_shift(frame.intrinsics.focal_px(), virtual_pose.x, virtual_pose.y,
                                         frame.pose.x, frame.pose.y, focal_distance);
  for (int y = 0; y < h; ++y) {
    detail::register_row(frame.image, shift, correction, y, [&](int x, int yy, double v) {
      out.image.at(x, yy) = static_cast<float>(v);
      out.covered.at(x, yy) = 1;
    });
  }
  return out;
}

std::vector<std::size_t> window_frames(const ScanStack& stack, double viewpoint, double aperture) {
  const double lo = viewpoint - 0.5 * aperture - kWindowTolerance;
  const double hi = viewpoint + 0.5 * aperture + kWindowTolerance;
  std::vector<std::size_t> indices;
  for (std::size_t i = 0; i < stack.size(); ++i) {
    const double x = stack.frame(i).pose.x;
    if (x >= lo && x <= hi) indices.push_back(i);
  }
  return indices;
}

IntegralImage integrate(const ScanStack& stack, const IntegralParams& params) {
  check_focal_distance(params.focal_distance);
  if (!(params.aperture >= 0.0) || !std::isfinite(params.aperture)) {
    throw ValidationError("aperture a must be >= 0, got " + meters(params.aperture));
  }
  if (!std::isfinite(params.viewpoint)) throw ValidationError("viewpoint u must be finite");

  IntegralImage result;
  result.params = params;
  result.intrinsics = stack.intrinsics();
  result.grid_pose = Pose{params.grid(), stack.y(), stack.altitude()};
  result.frame_indices = window_frames(stack, params.viewpoint, params.aperture);
  if (result.frame_indices.empty()) {
    throw ValidationError("no frames in aperture window [" + meters(params.window_lo()) + ", " +
                              meters(params.window_hi()) + "] m",
                          "available poses span [" + meters(stack.x_min()) + ", " +
                              meters(stack.x_max()) + "] m");
  }

  const int w = result.intrinsics.width;
  const int h = result.intrinsics.height;
  const double f = result.intrinsics.focal_px();
  std::vector<detail::Shift> shifts;
  shifts.reserve(result.frame_indices.size());
  for (std::size_t i : result.frame_indices) {
    const Pose& p = stack.frame(i).pose;
    shifts.push_back(detail::plane_shift(f, result.grid_pose.x, result.grid_pose.y, p.x, p.y,
                                         params.focal_distance));
  }

  result.image = ImageF(w, h);
  result.coverage = Image<std::uint16_t>(w, h, 0);
#pragma omp parallel
  {
    std::vector<double> sum(static_cast<std::size_t>(w));
    std::vector<std::uint16_t> count(static_cast<std::size_t>(w));
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) {
      std::fill(sum.begin(), sum.end(), 0.0);
      std::fill(count.begin(), count.end(), std::uint16_t{0});
      // frames are visited in stack (x-sorted) order, so the sum is
      // independent of the order frames were supplied in
      for (std::size_t k = 0; k < shifts.size(); ++k) {
        const std::size_t fi = result.frame_indices[k];
        detail::register_row(stack.frame(fi).image, shifts[k], stack.correction(fi), y,
                             [&](int x, int, double v) {
                               sum[x] += v;
                               ++count[x];
                             });
      }
      auto out = result.image.row(y);
      auto cov = result.coverage.row(y);
      for (int x = 0; x < w; ++x) {
        cov[x] = count[x];
        out[x] = count[x] ? static_cast<float>(sum[x] / count[x]) : 0.0f;
      }
    }
  }
  return result;
}

void check_stereo_feasible(const ScanStack& stack, double center, double baseline, double aperture) {
  if (!(baseline >= 0.0) || !std::isfinite(baseline)) {
    throw ValidationError("baseline e_f must be >= 0, got " + meters(baseline));
  }
  if (!(aperture >= 0.0) || !std::isfinite(aperture)) {
    throw ValidationError("aperture a must be >= 0, got " + meters(aperture));
  }
  const double length = stack.path_length();
  if (baseline + aperture > length + kWindowTolerance) {
    throw ValidationError("baseline e_f=" + meters(baseline) + " m with aperture a=" + meters(aperture) +
                              " m exceeds the " + meters(length) + " m path",
                          "e_f = " + meters(length) + " m - a is the maximum (e_f <= " +
                              meters(std::max(0.0, length - aperture)) + " m for a=" +
                              meters(aperture) + " m)");
  }
  if (!std::isfinite(center)) throw ValidationError("viewpoint u must be finite");
}

StereoPair stereo_pair(const ScanStack& stack, double center, double baseline, double aperture,
                       double focal_distance) {
  check_stereo_feasible(stack, center, baseline, aperture);
  StereoPair pair;
  pair.center = center;
  pair.baseline = baseline;
  pair.aperture = aperture;
  pair.focal_distance = focal_distance;
  pair.left = integrate(stack, {center - 0.5 * baseline, aperture, focal_distance, center});
  pair.right = integrate(stack, {center + 0.5 * baseline, aperture, focal_distance, center});
  return pair;
}

std::uint8_t DisplayRange::quantize(double v) const noexcept {
  const double span = hi - lo;
  const double t = span > 0.0 ? (v - lo) / span : 0.0;
  return static_cast<std::uint8_t>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0));
}

double DisplayRange::dequantize(std::uint8_t q) const noexcept {
  return lo + (hi - lo) * (q / 255.0);
}

DisplayRange display_range(const StereoPair& pair) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const IntegralImage* eye : {&pair.left, &pair.right}) {
    const auto pixels = eye->image.pixels();
    const auto cov = eye->coverage.pixels();
    for (std::size_t i = 0; i < pixels.size(); ++i) {
      if (!cov[i]) continue;
      lo = std::min(lo, static_cast<double>(pixels[i]));
      hi = std::max(hi, static_cast<double>(pixels[i]));
    }
  }
  if (!(hi >= lo)) return {0.0, 1.0};
  return {lo, hi};
}

namespace {
void check_pair_dimensions(const StereoPair& pair) {
  if (pair.left.image.width() != pair.right.image.width() ||
      pair.left.image.height() != pair.right.image.height()) {
    throw ValidationError("stereo pair eyes have mismatched dimensions");
  }
}
}  // namespace

ImageF compose_side_by_side(const StereoPair& pair) {
  check_pair_dimensions(pair);
  const int w = pair.left.image.width();
  const int h = pair.left.image.height();
  ImageF out(2 * w, h);
  for (int y = 0; y < h; ++y) {
    std::copy_n(pair.left.image.row(y).begin(), w, out.row(y).begin());
    std::copy_n(pair.right.image.row(y).begin(), w, out.row(y).begin() + w);
  }
  return out;
}

ImageRgb8 compose_anaglyph(const StereoPair& pair, const DisplayRange& range) {
  check_pair_dimensions(pair);
  const int w = pair.left.image.width();
  const int h = pair.left.image.height();
  ImageRgb8 out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::uint8_t r = range.quantize(pair.left.image.at(x, y));
      const std::uint8_t c = range.quantize(pair.right.image.at(x, y));
      out.at(x, y) = {r, c, c};
    }
  }
  return out;
}

DisplayImage compose_display(const StereoPair& pair, DisplayMode mode) {
  if (mode == DisplayMode::side_by_side) return compose_side_by_side(pair);
  return compose_anaglyph(pair, display_range(pair));
}

std::pair<ImageF, ImageF> split_anaglyph(const ImageRgb8& anaglyph, const DisplayRange& range) {
  ImageF left(anaglyph.width(), anaglyph.height());
  ImageF right(anaglyph.width(), anaglyph.height());
  for (int y = 0; y < anaglyph.height(); ++y) {
    for (int x = 0; x < anaglyph.width(); ++x) {
      const Rgb8& px = anaglyph.at(x, y);
      left.at(x, y) = static_cast<float>(range.dequantize(px[0]));
      right.at(x, y) = static_cast<float>(range.dequantize(px[1]));
    }
  }
  return {std::move(left), std::move(right)};
}

}  // namespace aos::integral
