#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "splatsim/core/camera.hpp"
#include "splatsim/core/gaussian.hpp"
#include "splatsim/render/buffers.hpp"

namespace splatsim {

// Isotropic screen-space dilation added to every projected covariance (px^2).
inline constexpr double kLowPassVariance = 0.3;
// Contributions below this alpha are skipped.
inline constexpr double kMinAlpha = 1.0 / 255.0;
// Accumulation stops once transmittance falls below this value.
inline constexpr double kMinTransmittance = 1e-4;
inline constexpr int kTileSize = 16;
// Splats whose mean projects farther than this multiple of the half-image
// extent from the principal point are culled. Near the camera plane the
// linearized footprint of such splats blows up and smears across the view.
inline constexpr double kGuardBand = 1.3;

struct ProjectedGaussian {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  // Includes the low-pass term.
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d inverse_covariance = Eigen::Matrix2d::Identity();
  double depth = 0.0;
  double opacity = 0.0;
  Eigen::Vector3d color = Eigen::Vector3d::Zero();
};

// d(pixel)/d(camera-space point) of the pinhole map at p_cam.
Eigen::Matrix<double, 2, 3> projection_jacobian(const CameraView& cam, const Eigen::Vector3d& p_cam);

// Projects a world-space Gaussian: Sigma' = J W Sigma W^T J^T + 0.3 I, with
// W the world-to-camera rotation. Empty when the mean is in front of the
// near plane or outside the guard band.
std::optional<ProjectedGaussian> project_gaussian(const CameraView& cam, const GaussianPrimitive& g);

// Same with the Gaussian given in a local frame placed by `local_to_world`.
std::optional<ProjectedGaussian> project_gaussian(const CameraView& cam, const GaussianPrimitive& g,
                                                  const Pose& local_to_world);

// Per-pixel alpha o * exp(-d^T Sigma'^-1 d / 2) at pixel center (x, y).
double gaussian_alpha(const ProjectedGaussian& p, double x, double y);

// Front-to-back alpha compositing of the depth-sorted cloud over a uniform
// background. Equivalent to composite() with an empty mesh pass.
RenderBuffers render_gaussians(const CameraView& cam, const GaussianCloud& cloud,
                               const Eigen::Vector3d& background_color = Eigen::Vector3d::Zero());

}  // namespace splatsim
