#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include "aos/scan_stack.hpp"
#include "aos/scene.hpp"

namespace aos::test {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("aos_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Quarter-resolution camera for tests that do not need the full 640x512.
inline CameraIntrinsics small_camera() { return CameraIntrinsics{61.0, 160, 128}; }

inline ScanStack preset_stack(int preset, std::uint64_t seed = 1, const CameraIntrinsics& intr = {}) {
  const sim::SceneSpec spec = sim::preset(preset, seed);
  return sim::render_scan(sim::generate_scene(spec), sim::default_path(spec), intr);
}

/// Flat noise-free ground with no targets or occluders.
inline sim::SceneSpec bare_ground(double temp = 15.0) {
  sim::SceneSpec spec;
  spec.ground_temp = temp;
  spec.ground_noise_amp = 0.0;
  return spec;
}

}  // namespace aos::test
