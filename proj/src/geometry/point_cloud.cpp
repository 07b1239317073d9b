#include "splatsim/geometry/point_cloud.hpp"

#include <cmath>

#include <fmt/format.h>

#include "splatsim/core/error.hpp"

namespace splatsim {

void PointCloud::validate() const {
  if (!normals.empty() && normals.size() != points.size()) {
    throw invalid_argument(fmt::format("point cloud has {} points but {} normals", points.size(), normals.size()));
  }
  for (std::size_t i = 0; i < normals.size(); ++i) {
    if (std::abs(normals[i].norm() - 1.0) > 1e-6) throw invalid_argument(fmt::format("normal {} is not unit length", i));
  }
}

PointCloud PointCloud::transformed(const Pose& pose) const {
  PointCloud out;
  out.points.reserve(points.size());
  for (const auto& p : points) out.points.push_back(pose.apply(p));
  out.normals.reserve(normals.size());
  for (const auto& n : normals) out.normals.push_back(pose.rotate(n));
  return out;
}

PointCloud depth_to_pointcloud(const DepthImage& depth, const CameraView& cam, int stride) {
  if (depth.width != cam.width || depth.height != cam.height) {
    throw invalid_argument(fmt::format("depth image is {}x{} but camera is {}x{}", depth.width, depth.height,
                                       cam.width, cam.height));
  }
  if (stride < 1) throw invalid_argument("depth stride must be >= 1");
  const Pose cam_to_world = cam.camera_to_world();
  PointCloud cloud;
  for (int v = 0; v < depth.height; v += stride) {
    for (int u = 0; u < depth.width; u += stride) {
      const double z = depth.at(u, v);
      if (!std::isfinite(z)) continue;
      cloud.points.push_back(cam_to_world.apply(cam.unproject(u, v, z)));
    }
  }
  return cloud;
}

}  // namespace splatsim
