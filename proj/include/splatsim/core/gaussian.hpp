#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "splatsim/core/pose.hpp"

namespace splatsim {

// One anisotropic 3D Gaussian. `scale` holds per-axis standard deviations
// in meters; `color` is a single RGB value in [0,1] (no view dependence).
struct GaussianPrimitive {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d scale = Eigen::Vector3d::Constant(0.01);
  double opacity = 0.5;
  Eigen::Vector3d color = Eigen::Vector3d::Constant(0.5);

  // R diag(S)^2 R^T, symmetrized.
  Eigen::Matrix3d covariance() const;

  // Same Gaussian expressed in the parent frame of `pose`.
  GaussianPrimitive transformed(const Pose& pose) const;

  void validate() const;
};

struct GaussianCloud {
  std::vector<GaussianPrimitive> primitives;
  Pose local_to_world;

  std::size_t size() const { return primitives.size(); }
  bool empty() const { return primitives.empty(); }

  // Checks every primitive; `index` in the message identifies the offender.
  void validate() const;
};

}  // namespace splatsim
