#pragma once

#include <Eigen/Core>

#include "splatsim/core/pose.hpp"
#include "splatsim/core/scene.hpp"

namespace splatsim {

// Grasp depth below the object top is min(kMaxGraspDepth, height / 2).
inline constexpr double kMaxGraspDepth = 0.03;
inline constexpr double kPreGraspOffset = 0.10;

struct GraspPlan {
  // Gripper poses in the world: approach axis (+z) pointing down, closing
  // axis (+y) along the gripped footprint axis.
  Pose pre_grasp;
  Pose grasp;
  // Object extent along the closing axis.
  double width = 0.0;
  // Gripper height above the object's lowest point.
  double height_above_bottom = 0.0;
};

// Top-down gripper pose with yaw psi: Rz(psi) * Rx(pi). Its closing axis is
// (sin psi, -cos psi, 0).
Pose top_down_pose(const Eigen::Vector3d& position, double psi);

// Top-down grasp from the posed collision-mesh vertices: principal axes of
// the horizontal footprint, centered between the extremes along them,
// closing along the minor axis (the major axis if only that one fits).
// Yaw is reported in [-pi/2, pi/2). Throws Error(generation) when the object
// is not graspable or wider than `max_opening` along both axes.
GraspPlan compute_grasp(const RigidObject& object, double max_opening);

// Extent of the posed collision mesh along a unit direction.
double extent_along(const RigidObject& object, const Eigen::Vector3d& direction);

}  // namespace splatsim
