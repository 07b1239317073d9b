#include "splatsim/core/camera.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "splatsim/core/error.hpp"

namespace splatsim {

void CameraView::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw invalid_argument(fmt::format("camera focal lengths must be positive (fx={}, fy={})", fx, fy));
  }
  if (!(near > 0.0) || !(near < far)) {
    throw invalid_argument(fmt::format("camera clip planes must satisfy 0 < near < far (near={}, far={})", near, far));
  }
  if (width < 1 || height < 1) {
    throw invalid_argument(fmt::format("camera size must be at least 1x1 (got {}x{})", width, height));
  }
  if (!is_unit_quaternion(world_to_camera.rotation, 1e-6)) {
    throw invalid_argument("camera extrinsic rotation is not a unit quaternion");
  }
}

std::optional<Eigen::Vector3d> CameraView::project(const Eigen::Vector3d& world) const {
  const Eigen::Vector3d p = to_camera(world);
  if (p.z() < near) return std::nullopt;
  const Eigen::Vector2d uv = project_camera(p);
  return Eigen::Vector3d(uv.x(), uv.y(), p.z());
}

CameraView CameraView::look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
                               const Eigen::Vector3d& up, int width, int height,
                               double vertical_fov_deg, double near, double far) {
  const Eigen::Vector3d z = (target - eye).normalized();
  Eigen::Vector3d x = z.cross(up);
  if (x.norm() < 1e-9) x = z.unitOrthogonal();
  x.normalize();
  const Eigen::Vector3d y = z.cross(x);
  Eigen::Matrix3d r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;

  CameraView cam;
  cam.width = width;
  cam.height = height;
  const double fov = vertical_fov_deg * std::numbers::pi / 180.0;
  cam.fy = 0.5 * height / std::tan(0.5 * fov);
  cam.fx = cam.fy;
  cam.cx = 0.5 * (width - 1);
  cam.cy = 0.5 * (height - 1);
  cam.near = near;
  cam.far = far;
  cam.world_to_camera = Pose::from_rotation_matrix(r, eye).inverse();
  return cam;
}

CameraView CameraView::with_camera_pose(const Pose& camera_to_world) const {
  CameraView out = *this;
  out.world_to_camera = camera_to_world.inverse();
  return out;
}

}  // namespace splatsim
