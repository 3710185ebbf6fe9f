#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "aos/integral.hpp"
#include "aos/io.hpp"
#include "aos/perception.hpp"
#include "aos/scan_stack.hpp"

// Canonical render requests shared by the CLI and the viewer service, so both
// produce the same bytes for the same parameters.
namespace aos::render {

/// Meters to integer millimeters (round half away from zero).
std::int64_t to_mm(double meters);
double from_mm(std::int64_t mm);
/// Rounds a length to millimeter resolution.
inline double canonical(double meters) { return from_mm(to_mm(meters)); }

struct IntegralRequest {
  double u = 0.0;
  double a = 0.0;
  double h = 0.0;

  /// Copy with every length rounded to millimeters.
  IntegralRequest canonical() const;
  /// "integral:u=<mm>:a=<mm>:h=<mm>"
  std::string key() const;
};

struct StereoRequest {
  double u = 0.0;
  double a = 0.0;
  double ef = 0.0;
  double h = 0.0;
  integral::DisplayMode mode = integral::DisplayMode::side_by_side;

  StereoRequest canonical() const;
  std::string key() const;
};

std::string to_string(integral::DisplayMode mode);
std::optional<integral::DisplayMode> parse_display_mode(const std::string& name);

/// Defaults: u = path center, a = 14 m capped to the path length, h = altitude.
IntegralRequest default_integral(const ScanStack& stack);
/// Defaults: u = path center, a = 2 m, e_f = 1 m, h = altitude.
StereoRequest default_stereo(const ScanStack& stack);

/// Throws ValidationError when u lies outside the sampled poses.
void check_viewpoint(const ScanStack& stack, double u);

/// Canonicalizes, validates, integrates and encodes as 16-bit radiance PNG.
integral::IntegralImage render_integral(const ScanStack& stack, const IntegralRequest& request);
io::Bytes integral_png(const ScanStack& stack, const IntegralRequest& request);

integral::StereoPair render_stereo(const ScanStack& stack, const StereoRequest& request);
/// Side-by-side (16-bit) or anaglyph (8-bit RGB) composite of the pair.
io::Bytes stereo_png(const ScanStack& stack, const StereoRequest& request);

/// Strong validator for a canonical key: quoted 64-bit FNV-1a hex digest.
std::string etag(const std::string& key);

}  // namespace aos::render
