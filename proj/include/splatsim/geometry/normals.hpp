#pragma once

#include "splatsim/geometry/point_cloud.hpp"

namespace splatsim {

// Per-point normal of the least-squares plane through the k nearest
// neighbors (the point itself included), flipped to face `viewpoint`.
PointCloud estimate_normals(const PointCloud& cloud, std::size_t k, const Eigen::Vector3d& viewpoint);

}  // namespace splatsim
