#include "aos/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "aos/error.hpp"

namespace aos::render {

namespace {

std::string mm_text(double meters) { return std::to_string(to_mm(meters)); }

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::int64_t to_mm(double meters) {
  if (!std::isfinite(meters) || std::abs(meters) > 1e12) {
    throw ValidationError("length " + g6(meters) + " m is not representable at millimeter resolution");
  }
  return static_cast<std::int64_t>(std::llround(meters * 1000.0));
}

double from_mm(std::int64_t mm) { return static_cast<double>(mm) / 1000.0; }

IntegralRequest IntegralRequest::canonical() const {
  return {render::canonical(u), render::canonical(a), render::canonical(h)};
}

std::string IntegralRequest::key() const {
  return "integral:u=" + mm_text(u) + ":a=" + mm_text(a) + ":h=" + mm_text(h);
}

StereoRequest StereoRequest::canonical() const {
  return {render::canonical(u), render::canonical(a), render::canonical(ef), render::canonical(h), mode};
}

std::string StereoRequest::key() const {
  return "stereo:u=" + mm_text(u) + ":a=" + mm_text(a) + ":ef=" + mm_text(ef) + ":h=" + mm_text(h) +
         ":mode=" + to_string(mode);
}

std::string to_string(integral::DisplayMode mode) {
  return mode == integral::DisplayMode::anaglyph ? "anaglyph" : "sbs";
}

std::optional<integral::DisplayMode> parse_display_mode(const std::string& name) {
  if (name == "sbs" || name == "side-by-side" || name == "side_by_side") return integral::DisplayMode::side_by_side;
  if (name == "anaglyph") return integral::DisplayMode::anaglyph;
  return std::nullopt;
}

IntegralRequest default_integral(const ScanStack& stack) {
  return {stack.path_center(), std::min(14.0, stack.path_length()), stack.altitude()};
}

StereoRequest default_stereo(const ScanStack& stack) {
  return {stack.path_center(), 2.0, 1.0, stack.altitude(), integral::DisplayMode::side_by_side};
}

void check_viewpoint(const ScanStack& stack, double u) {
  constexpr double tol = 5e-4;  // half a millimeter, the canonical resolution
  if (!(u >= stack.x_min() - tol && u <= stack.x_max() + tol)) {
    throw ValidationError("viewpoint u=" + g6(u) + " m lies outside the scan path",
                          "u in [" + g6(stack.x_min()) + ", " + g6(stack.x_max()) + "] m");
  }
}

integral::IntegralImage render_integral(const ScanStack& stack, const IntegralRequest& request) {
  const IntegralRequest r = request.canonical();
  check_viewpoint(stack, r.u);
  return integral::integrate(stack, {r.u, r.a, r.h, std::nullopt});
}

io::Bytes integral_png(const ScanStack& stack, const IntegralRequest& request) {
  return io::encode_radiance_png(render_integral(stack, request).image);
}

integral::StereoPair render_stereo(const ScanStack& stack, const StereoRequest& request) {
  const StereoRequest r = request.canonical();
  check_viewpoint(stack, r.u);
  return integral::stereo_pair(stack, r.u, r.ef, r.a, r.h);
}

io::Bytes stereo_png(const ScanStack& stack, const StereoRequest& request) {
  const auto pair = render_stereo(stack, request);
  return io::encode_display_png(integral::compose_display(pair, request.mode));
}

std::string etag(const std::string& key) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : key) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "\"%016llx\"", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace aos::render
