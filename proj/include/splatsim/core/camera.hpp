#pragma once

#include <optional>

#include <Eigen/Core>

#include "splatsim/core/pose.hpp"

namespace splatsim {

// Pinhole camera in the OpenCV convention: +z forward, +x right, +y down.
// Pixel (u, v) samples the image plane at continuous coordinates (u, v), so
// the principal point (cx, cy) sits at a pixel center when it is integral.
struct CameraView {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;
  Pose world_to_camera;
  double near = 0.05;
  double far = 100.0;

  // Throws invalid_argument on violated invariants.
  void validate() const;

  Pose camera_to_world() const { return world_to_camera.inverse(); }
  Eigen::Vector3d to_camera(const Eigen::Vector3d& world) const { return world_to_camera.apply(world); }

  // Pixel coordinates of a camera-space point; requires z > 0.
  Eigen::Vector2d project_camera(const Eigen::Vector3d& p_cam) const {
    return {fx * p_cam.x() / p_cam.z() + cx, fy * p_cam.y() / p_cam.z() + cy};
  }

  // Pixel coordinates and camera depth of a world point in front of the
  // near plane.
  std::optional<Eigen::Vector3d> project(const Eigen::Vector3d& world) const;

  // Camera-space point at pixel (u, v) with camera depth z.
  Eigen::Vector3d unproject(double u, double v, double z) const {
    return {(u - cx) / fx * z, (v - cy) / fy * z, z};
  }

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

  // Camera at `eye` looking at `target`, image rows running against `up`.
  static CameraView look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
                            const Eigen::Vector3d& up, int width, int height,
                            double vertical_fov_deg, double near = 0.05, double far = 100.0);

  // Same intrinsics, camera placed at `camera_to_world`.
  CameraView with_camera_pose(const Pose& camera_to_world) const;
};

}  // namespace splatsim
