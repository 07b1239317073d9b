#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace splatsim {

// 8-bit RGB, row-major, interleaved.
struct Image8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  Image8() = default;
  Image8(int w, int h, std::uint8_t fill = 0) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, fill) {}

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  std::uint8_t* at(int x, int y) { return data.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
  const std::uint8_t* at(int x, int y) const { return data.data() + (static_cast<std::size_t>(y) * width + x) * 3; }

  bool same_size(const Image8& other) const { return width == other.width && height == other.height; }
  friend bool operator==(const Image8&, const Image8&) = default;
};

// Per-pixel camera-space depth in meters; +inf where nothing was hit.
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<float> depth;

  DepthImage() = default;
  DepthImage(int w, int h)
      : width(w), height(h), depth(static_cast<std::size_t>(w) * h, std::numeric_limits<float>::infinity()) {}

  float& at(int x, int y) { return depth[static_cast<std::size_t>(y) * width + x]; }
  float at(int x, int y) const { return depth[static_cast<std::size_t>(y) * width + x]; }
};

// Rounds and clamps a [0,1] value to 8 bits.
std::uint8_t to_byte(double v);

}  // namespace splatsim
