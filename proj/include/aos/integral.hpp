#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "aos/camera.hpp"
#include "aos/scan_stack.hpp"

namespace aos::integral {

/// A frame resampled into a virtual camera's pixel grid.
struct RegisteredImage {
  ImageF image;
  Image<std::uint8_t> covered;  ///< 1 where the source frame contributed
};

/// Warps `frame` into the pixel grid of `virtual_pose` via the homography
/// induced by the plane at `focal_distance` below the aperture plane. For
/// nadir cameras on a shared altitude this is a pure translation of
/// f_px * (virtual - frame) / focal_distance pixels, resampled bilinearly.
RegisteredImage project_to_viewpoint(const Frame& frame, const Pose& virtual_pose,
                                     double focal_distance, const FrameCorrection& correction = {});

struct IntegralParams {
  double viewpoint = 0.0;       ///< u, center of the aperture window on the path
  double aperture = 0.0;        ///< a, window [u - a/2, u + a/2], closed
  double focal_distance = 26.0; ///< h, aperture plane to focal plane
  /// x of the virtual camera whose pixel grid receives the result; defaults
  /// to `viewpoint`. Stereo pairs render both eyes into the center grid so
  /// that focal-plane features have zero disparity.
  std::optional<double> grid_x;

  double grid() const noexcept { return grid_x.value_or(viewpoint); }
  double window_lo() const noexcept { return viewpoint - 0.5 * aperture; }
  double window_hi() const noexcept { return viewpoint + 0.5 * aperture; }
};

struct IntegralImage {
  ImageF image;                        ///< mean radiance; 0 where uncovered
  Image<std::uint16_t> coverage;       ///< contributing frames per pixel
  IntegralParams params;
  std::vector<std::size_t> frame_indices;  ///< stack indices inside the window
  CameraIntrinsics intrinsics;
  Pose grid_pose;                      ///< virtual camera of the pixel grid

  std::size_t frame_count() const noexcept { return frame_indices.size(); }
};

/// Stack indices whose pose lies in [u - a/2, u + a/2] (edges included).
std::vector<std::size_t> window_frames(const ScanStack& stack, double viewpoint, double aperture);

/// Per-pixel mean of all registered frames inside the aperture window.
/// Throws ValidationError when the window holds no frame.
IntegralImage integrate(const ScanStack& stack, const IntegralParams& params);

struct StereoPair {
  IntegralImage left;
  IntegralImage right;
  double center = 0.0;    ///< u
  double baseline = 0.0;  ///< e_f
  double aperture = 0.0;  ///< a
  double focal_distance = 26.0;
};

/// Throws ValidationError (with the feasible range as constraint) unless
/// e_f >= 0, a >= 0 and e_f + a does not exceed the path length.
void check_stereo_feasible(const ScanStack& stack, double center, double baseline, double aperture);

/// Left and right integrals at u -/+ e_f/2, both rendered into the pixel grid
/// of u. Windows are independent and may share frames when e_f < a.
StereoPair stereo_pair(const ScanStack& stack, double center, double baseline, double aperture,
                       double focal_distance);

enum class DisplayMode { side_by_side, anaglyph };

/// Linear map from radiance to 8-bit used for anaglyph channels.
struct DisplayRange {
  double lo = 0.0;
  double hi = 1.0;

  std::uint8_t quantize(double v) const noexcept;
  double dequantize(std::uint8_t q) const noexcept;
};

/// Min/max radiance over covered pixels of both eyes.
DisplayRange display_range(const StereoPair& pair);

/// Left eye on the left half, right eye on the right half.
ImageF compose_side_by_side(const StereoPair& pair);
/// Red channel carries the left eye, green and blue the right eye.
ImageRgb8 compose_anaglyph(const StereoPair& pair, const DisplayRange& range);

using DisplayImage = std::variant<ImageF, ImageRgb8>;
DisplayImage compose_display(const StereoPair& pair, DisplayMode mode);

/// Inverse of compose_anaglyph up to 8-bit quantization.
std::pair<ImageF, ImageF> split_anaglyph(const ImageRgb8& anaglyph, const DisplayRange& range);

}  // namespace aos::integral
