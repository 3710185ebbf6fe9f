#pragma once

#include "aos/image.hpp"

namespace aos {

/// Pinhole intrinsics of a nadir camera. Pixel (i, j) has its center at
/// continuous coordinate (i, j); the principal point is the image center.
struct CameraIntrinsics {
  double fov_deg = 61.0;  ///< full horizontal field of view
  int width = 640;
  int height = 512;

  /// f_px = (width / 2) / tan(fov / 2)
  double focal_px() const;
  double cx() const noexcept { return (width - 1) * 0.5; }
  double cy() const noexcept { return (height - 1) * 0.5; }

  /// Throws ValidationError unless 0 < fov < 180 and resolution > 0.
  void validate() const;

  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

/// Camera position in world meters. Orientation is always nadir; z is the
/// altitude above ground level.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double z = 26.0;

  friend bool operator==(const Pose&, const Pose&) = default;
};

struct Frame {
  ImageF image;
  Pose pose;
  CameraIntrinsics intrinsics;
};

}  // namespace aos
