#pragma once

#include <vector>

#include "aos/camera.hpp"

namespace aos {

/// Per-frame radiometric correction applied at registration time
/// (value * gain + offset). Identity for simulated data.
struct FrameCorrection {
  double gain = 1.0;
  double offset = 0.0;

  bool identity() const noexcept { return gain == 1.0 && offset == 0.0; }
  friend bool operator==(const FrameCorrection&, const FrameCorrection&) = default;
};

/// Frames captured along a linear, constant-altitude nadir path.
///
/// Frames are stored sorted by x. Construction rejects empty input, mixed
/// intrinsics, mixed altitude or y, duplicate x positions, and images whose
/// size does not match the intrinsics.
class ScanStack {
 public:
  explicit ScanStack(std::vector<Frame> frames, std::vector<FrameCorrection> corrections = {});

  const std::vector<Frame>& frames() const noexcept { return frames_; }
  const Frame& frame(std::size_t i) const { return frames_.at(i); }
  std::size_t size() const noexcept { return frames_.size(); }

  const CameraIntrinsics& intrinsics() const noexcept { return frames_.front().intrinsics; }
  double altitude() const noexcept { return frames_.front().pose.z; }
  double y() const noexcept { return frames_.front().pose.y; }
  double x_min() const noexcept { return frames_.front().pose.x; }
  double x_max() const noexcept { return frames_.back().pose.x; }
  double path_length() const noexcept { return x_max() - x_min(); }
  double path_center() const noexcept { return 0.5 * (x_min() + x_max()); }
  /// Mean sampling distance; 0 for a single frame.
  double spacing() const noexcept;

  const FrameCorrection& correction(std::size_t i) const { return corrections_.at(i); }

 private:
  std::vector<Frame> frames_;
  std::vector<FrameCorrection> corrections_;
};

}  // namespace aos
