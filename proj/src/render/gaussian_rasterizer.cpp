#include "splatsim/render/gaussian_rasterizer.hpp"

#include <algorithm>
#include <cmath>

#include "splatsim/render/compositor.hpp"

namespace splatsim {

Eigen::Matrix<double, 2, 3> projection_jacobian(const CameraView& cam, const Eigen::Vector3d& p) {
  const double inv_z = 1.0 / p.z();
  const double inv_z2 = inv_z * inv_z;
  Eigen::Matrix<double, 2, 3> j;
  j << cam.fx * inv_z, 0.0, -cam.fx * p.x() * inv_z2,  //
      0.0, cam.fy * inv_z, -cam.fy * p.y() * inv_z2;
  return j;
}

std::optional<ProjectedGaussian> project_gaussian(const CameraView& cam, const GaussianPrimitive& g,
                                                  const Pose& local_to_world) {
  const Pose local_to_camera = compose(cam.world_to_camera, local_to_world);
  const Eigen::Vector3d p = local_to_camera.apply(g.mean);
  if (!(p.z() >= cam.near)) return std::nullopt;
  const double gx = kGuardBand * std::max(cam.cx, cam.width - cam.cx) / cam.fx;
  const double gy = kGuardBand * std::max(cam.cy, cam.height - cam.cy) / cam.fy;
  if (std::abs(p.x()) > gx * p.z() || std::abs(p.y()) > gy * p.z()) return std::nullopt;
  const Eigen::Matrix3d w = local_to_camera.rotation_matrix();
  const Eigen::Matrix<double, 2, 3> jw = projection_jacobian(cam, p) * w;
  ProjectedGaussian out;
  out.mean = cam.project_camera(p);
  Eigen::Matrix2d cov = jw * g.covariance() * jw.transpose();
  cov(0, 1) = cov(1, 0) = 0.5 * (cov(0, 1) + cov(1, 0));
  cov(0, 0) += kLowPassVariance;
  cov(1, 1) += kLowPassVariance;
  out.covariance = cov;
  const double det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(1, 0);
  out.inverse_covariance << cov(1, 1) / det, -cov(0, 1) / det, -cov(1, 0) / det, cov(0, 0) / det;
  out.depth = p.z();
  out.opacity = g.opacity;
  out.color = g.color;
  return out;
}

std::optional<ProjectedGaussian> project_gaussian(const CameraView& cam, const GaussianPrimitive& g) {
  return project_gaussian(cam, g, Pose::identity());
}

double gaussian_alpha(const ProjectedGaussian& p, double x, double y) {
  const double dx = x - p.mean.x(), dy = y - p.mean.y();
  const Eigen::Matrix2d& c = p.inverse_covariance;
  const double q = c(0, 0) * dx * dx + (c(0, 1) + c(1, 0)) * dx * dy + c(1, 1) * dy * dy;
  return p.opacity * std::exp(-0.5 * q);
}

RenderBuffers render_gaussians(const CameraView& cam, const GaussianCloud& cloud,
                               const Eigen::Vector3d& background_color) {
  cam.validate();
  return composite(cam, cloud, RenderBuffers(cam.width, cam.height), background_color);
}

}  // namespace splatsim
