#pragma once

#include <vector>

#include <Eigen/Core>

#include "splatsim/core/camera.hpp"
#include "splatsim/core/image.hpp"
#include "splatsim/core/pose.hpp"

namespace splatsim {

struct PointCloud {
  std::vector<Eigen::Vector3d> points;
  // Empty or one unit normal per point.
  std::vector<Eigen::Vector3d> normals;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_normals() const { return !normals.empty(); }

  void validate() const;
  PointCloud transformed(const Pose& pose) const;
};

// Back-projects every `stride`-th finite pixel through the intrinsics and
// expresses the points in the world frame.
PointCloud depth_to_pointcloud(const DepthImage& depth, const CameraView& cam, int stride = 1);

}  // namespace splatsim
