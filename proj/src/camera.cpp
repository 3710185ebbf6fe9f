#include "aos/camera.hpp"

#include <cmath>
#include <numbers>

#include "aos/error.hpp"

namespace aos {

double CameraIntrinsics::focal_px() const {
  return (width * 0.5) / std::tan(fov_deg * std::numbers::pi / 360.0);
}

void CameraIntrinsics::validate() const {
  if (!(fov_deg > 0.0 && fov_deg < 180.0)) {
    throw ValidationError("camera field of view must lie in (0, 180) degrees, got " +
                          std::to_string(fov_deg));
  }
  if (width <= 0 || height <= 0) {
    throw ValidationError("camera resolution must be positive, got " + std::to_string(width) +
                          "x" + std::to_string(height));
  }
}

}  // namespace aos
