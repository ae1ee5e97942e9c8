#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace droplab {

// Row-major 8-bit raster. The tag keeps grayscale frames and binary masks
// from being mixed up at call sites.
template <typename Tag>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, std::uint8_t fill = 0)
      : width_(width), height_(height),
        pixels_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
    assert(width >= 0 && height >= 0);
  }
  Raster(int width, int height, std::vector<std::uint8_t> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    assert(pixels_.size() == static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  bool empty() const noexcept { return pixels_.empty(); }

  std::uint8_t operator()(int x, int y) const noexcept { return pixels_[index(x, y)]; }
  std::uint8_t& operator()(int x, int y) noexcept { return pixels_[index(x, y)]; }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }
  std::span<const std::uint8_t> row(int y) const noexcept {
    return std::span<const std::uint8_t>(pixels_).subspan(index(0, y), static_cast<std::size_t>(width_));
  }

  bool same_shape(int width, int height) const noexcept { return width_ == width && height_ == height; }
  template <typename Other>
  bool same_shape(const Raster<Other>& other) const noexcept {
    return same_shape(other.width(), other.height());
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    assert(x >= 0 && x < width_ && y >= 0 && y < height_);
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

struct GrayTag;
struct MaskTag;

using GrayImage = Raster<GrayTag>;
// Values are 0 or 1.
using BinaryMask = Raster<MaskTag>;

// Pixel quantization rule used everywhere: round half up, then clamp.
inline double round_half_up(double value) noexcept { return std::floor(value + 0.5); }

inline std::uint8_t quantize_u8(double value) noexcept {
  const double r = round_half_up(value);
  if (!(r > 0.0)) return 0;  // also maps NaN to 0
  if (r >= 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

}  // namespace droplab
