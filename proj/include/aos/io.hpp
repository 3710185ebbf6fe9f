#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aos/image.hpp"
#include "aos/integral.hpp"
#include "aos/metrics.hpp"
#include "aos/scan_stack.hpp"
#include "aos/scene.hpp"

namespace aos::io {

using Bytes = std::vector<std::uint8_t>;

/// 16-bit PNG counts per radiance unit: count = round(radiance * 1000).
inline constexpr double kRadianceScale = 1000.0;
/// Depth PNGs store millimeters: count = round(depth_m * 1000), 0 = invalid.
inline constexpr double kDepthScale = 1000.0;

inline constexpr const char* kPosesFile = "poses.txt";
inline constexpr const char* kSceneFile = "scene.yaml";

Image<std::uint16_t> quantize_radiance(const ImageF& image);
ImageF dequantize_radiance(const Image<std::uint16_t>& counts);

Bytes encode_png(const Image<std::uint16_t>& gray16);
Bytes encode_png(const ImageRgb8& rgb);
/// Radiance image as 16-bit grayscale PNG.
Bytes encode_radiance_png(const ImageF& image);
/// Side-by-side composites as 16-bit radiance PNG, anaglyphs as 8-bit RGB.
Bytes encode_display_png(const integral::DisplayImage& image);
Bytes encode_depth_png(const metrics::DepthMap& map);

/// Decodes 8- or 16-bit grayscale PNG into raw counts.
Image<std::uint16_t> decode_png_gray(const Bytes& png);
ImageRgb8 decode_png_rgb(const Bytes& png);

Bytes read_file(const std::filesystem::path& path);
/// Writes atomically enough for our purposes; throws IoError naming the path.
void write_file(const std::filesystem::path& path, const Bytes& bytes);
void write_text(const std::filesystem::path& path, const std::string& text);

/// One line of the poses sidecar: index x y z fov width height.
struct PoseRecord {
  int index = 0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double fov = 0.0;
  int width = 0;
  int height = 0;

  friend bool operator==(const PoseRecord&, const PoseRecord&) = default;
};

std::string format_poses(const std::vector<PoseRecord>& records);
std::vector<PoseRecord> parse_poses(const std::string& text);

std::string frame_file_name(int index);

/// Writes frame_NNNN.png per frame, poses.txt and (optionally) scene.yaml
/// ground truth into an existing directory.
void write_stack(const std::filesystem::path& dir, const ScanStack& stack,
                 const sim::Scene* ground_truth = nullptr);

struct LoadedStack {
  ScanStack stack;
  std::vector<PoseRecord> poses;
  std::optional<sim::Scene> ground_truth;
};

/// Reads a stack directory written by write_stack (or any recorded dataset
/// with the same layout). Ground truth is loaded when scene.yaml exists.
LoadedStack read_stack(const std::filesystem::path& dir);

}  // namespace aos::io
