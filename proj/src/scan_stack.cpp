#include "aos/scan_stack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aos/error.hpp"

namespace aos {

namespace {
constexpr double kPoseTolerance = 1e-9;
}

ScanStack::ScanStack(std::vector<Frame> frames, std::vector<FrameCorrection> corrections) {
  if (frames.empty()) throw ValidationError("scan stack needs at least one frame");
  if (corrections.empty()) corrections.assign(frames.size(), FrameCorrection{});
  if (corrections.size() != frames.size()) {
    throw ValidationError("scan stack: one radiometric correction per frame required");
  }

  std::vector<std::size_t> order(frames.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return frames[a].pose.x < frames[b].pose.x;
  });

  frames_.reserve(frames.size());
  corrections_.reserve(frames.size());
  for (std::size_t i : order) {
    frames_.push_back(std::move(frames[i]));
    corrections_.push_back(corrections[i]);
  }

  const Frame& first = frames_.front();
  first.intrinsics.validate();
  for (std::size_t i = 0; i < frames_.size(); ++i) {
    const Frame& f = frames_[i];
    if (!(f.intrinsics == first.intrinsics)) {
      throw ValidationError("scan stack frames must share intrinsics");
    }
    if (f.image.width() != f.intrinsics.width || f.image.height() != f.intrinsics.height) {
      throw ValidationError("frame image size does not match camera resolution");
    }
    if (std::abs(f.pose.z - first.pose.z) > kPoseTolerance ||
        std::abs(f.pose.y - first.pose.y) > kPoseTolerance) {
      throw ValidationError("scan stack frames must share altitude and y (linear path)");
    }
    if (i > 0 && !(f.pose.x > frames_[i - 1].pose.x)) {
      throw ValidationError("scan stack x positions must be strictly increasing (duplicate x=" +
                            std::to_string(f.pose.x) + ")");
    }
  }
  if (!(first.pose.z > 0.0)) throw ValidationError("scan altitude must be positive");
}

double ScanStack::spacing() const noexcept {
  if (frames_.size() < 2) return 0.0;
  return path_length() / static_cast<double>(frames_.size() - 1);
}

}  // namespace aos
