#pragma once

#include <limits>
#include <vector>

#include <Eigen/Core>

#include "splatsim/core/image.hpp"

namespace splatsim {

// Per-pixel color (RGB in [0,1]), camera depth (+inf when empty) and
// accumulated opacity, row-major.
struct RenderBuffers {
  int width = 0;
  int height = 0;
  std::vector<double> color;
  std::vector<double> depth;
  std::vector<double> alpha;

  RenderBuffers() = default;
  RenderBuffers(int w, int h)
      : width(w),
        height(h),
        color(static_cast<std::size_t>(w) * h * 3, 0.0),
        depth(static_cast<std::size_t>(w) * h, std::numeric_limits<double>::infinity()),
        alpha(static_cast<std::size_t>(w) * h, 0.0) {}

  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
  Eigen::Vector3d color_at(int x, int y) const {
    const std::size_t i = 3 * index(x, y);
    return {color[i], color[i + 1], color[i + 2]};
  }
  void set_color(std::size_t pixel, const Eigen::Vector3d& c) {
    color[3 * pixel] = c.x();
    color[3 * pixel + 1] = c.y();
    color[3 * pixel + 2] = c.z();
  }
  bool same_size(const RenderBuffers& other) const { return width == other.width && height == other.height; }
};

Image8 to_image8(const RenderBuffers& buffers);
DepthImage to_depth_image(const RenderBuffers& buffers);

}  // namespace splatsim
