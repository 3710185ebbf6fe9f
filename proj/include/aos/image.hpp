#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cstdint>
#include <span>
#include <vector>

namespace aos {

/// Dense row-major 2D grid.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
    assert(width >= 0 && height >= 0);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t size() const noexcept { return data_.size(); }

  T& at(int x, int y) { return data_[index(x, y)]; }
  const T& at(int x, int y) const { return data_[index(x, y)]; }

  std::span<T> row(int y) { return {data_.data() + index(0, y), static_cast<std::size_t>(width_)}; }
  std::span<const T> row(int y) const {
    return {data_.data() + index(0, y), static_cast<std::size_t>(width_)};
  }

  std::span<T> pixels() { return data_; }
  std::span<const T> pixels() const { return data_; }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  void fill(const T& value) { std::fill(data_.begin(), data_.end(), value); }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    assert(contains(x, y));
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using ImageF = Image<float>;
using Rgb8 = std::array<std::uint8_t, 3>;
using ImageRgb8 = Image<Rgb8>;

/// Axis-aligned pixel rectangle, half-open: [x, x + width) x [y, y + height).
struct PixelRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  bool empty() const noexcept { return width <= 0 || height <= 0; }
  int right() const noexcept { return x + width; }
  int bottom() const noexcept { return y + height; }

  template <typename T>
  bool inside(const Image<T>& image) const noexcept {
    return !empty() && x >= 0 && y >= 0 && right() <= image.width() && bottom() <= image.height();
  }

  /// Shrinks by `margin` pixels on every side (never below zero size).
  PixelRect shrunk(int margin) const noexcept {
    PixelRect r{x + margin, y + margin, width - 2 * margin, height - 2 * margin};
    r.width = std::max(r.width, 0);
    r.height = std::max(r.height, 0);
    return r;
  }

  PixelRect translated(int dx, int dy) const noexcept { return {x + dx, y + dy, width, height}; }

  /// Square window of side `size` centered on (cx, cy).
  static PixelRect centered(int cx, int cy, int size) noexcept {
    return {cx - size / 2, cy - size / 2, size, size};
  }

  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

}  // namespace aos
