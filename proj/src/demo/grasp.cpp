#include "splatsim/demo/grasp.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "splatsim/core/error.hpp"

namespace splatsim {

Pose top_down_pose(const Eigen::Vector3d& position, double psi) {
  const Eigen::Quaterniond q = Eigen::Quaterniond(Eigen::AngleAxisd(psi, Eigen::Vector3d::UnitZ())) *
                               Eigen::Quaterniond(Eigen::AngleAxisd(M_PI, Eigen::Vector3d::UnitX()));
  return Pose(q, position);
}

double extent_along(const RigidObject& object, const Eigen::Vector3d& direction) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& v : object.collision.vertices) {
    const double s = object.pose.apply(v).dot(direction);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return hi - lo;
}

GraspPlan compute_grasp(const RigidObject& object, double max_opening) {
  if (!object.graspable) throw Error(ErrorCategory::generation, fmt::format("object '{}' is not graspable", object.id));
  if (object.collision.vertices.empty()) throw invalid_argument(fmt::format("object '{}' has no collision mesh", object.id));

  std::vector<Eigen::Vector3d> pts;
  pts.reserve(object.collision.vertices.size());
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  double z_lo = std::numeric_limits<double>::infinity(), z_hi = -z_lo;
  for (const auto& v : object.collision.vertices) {
    pts.push_back(object.pose.apply(v));
    mean += pts.back().head<2>();
    z_lo = std::min(z_lo, pts.back().z());
    z_hi = std::max(z_hi, pts.back().z());
  }
  mean /= static_cast<double>(pts.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : pts) {
    const Eigen::Vector2d d = p.head<2>() - mean;
    cov += d * d.transpose();
  }
  auto span = [&](const Eigen::Vector2d& axis, double& center) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : pts) {
      const double s = p.head<2>().dot(axis);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    center = 0.5 * (lo + hi);
    return hi - lo;
  };
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  // Ascending eigenvalues: column 0 is the minor axis.
  Eigen::Vector2d minor = eig.eigenvectors().col(0).normalized();
  const Eigen::Vector2d lambda = eig.eigenvalues();
  if (lambda(1) - lambda(0) <= 1e-6 * lambda(1)) {
    // Isotropic footprint (square, disc): every axis is principal, so take
    // the narrowest one, which is normal to some footprint edge.
    double best = std::numeric_limits<double>::infinity(), unused = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        const Eigen::Vector2d e = pts[j].head<2>() - pts[i].head<2>();
        if (e.norm() < 1e-9) continue;
        const Eigen::Vector2d n = Eigen::Vector2d(-e.y(), e.x()).normalized();
        const double w = span(n, unused);
        if (w < best - 1e-12) {
          best = w;
          minor = n;
        }
      }
    }
  }
  const Eigen::Vector2d major(-minor.y(), minor.x());

  double c_minor = 0.0, c_major = 0.0;
  const double w_minor = span(minor, c_minor);
  const double w_major = span(major, c_major);

  Eigen::Vector2d closing;
  double width;
  if (w_minor <= max_opening) {
    closing = minor;
    width = w_minor;
  } else if (w_major <= max_opening) {
    closing = major;
    width = w_major;
  } else {
    throw Error(ErrorCategory::generation,
                fmt::format("object '{}' is {:.3f} x {:.3f} m across, wider than the {:.3f} m gripper opening",
                            object.id, w_minor, w_major, max_opening));
  }
  const Eigen::Vector2d center = c_minor * minor + c_major * major;

  // Closing axis (sin psi, -cos psi) = +-closing; the gripper is symmetric
  // under a half turn, so psi is folded into [-pi/2, pi/2).
  double psi = std::atan2(closing.x(), -closing.y());
  psi = std::fmod(psi + M_PI / 2, M_PI);
  if (psi < 0) psi += M_PI;
  psi -= M_PI / 2;

  const double height = z_hi - z_lo;
  const double depth = std::min(kMaxGraspDepth, 0.5 * height);
  GraspPlan plan;
  plan.grasp = top_down_pose({center.x(), center.y(), z_hi - depth}, psi);
  plan.pre_grasp = top_down_pose({center.x(), center.y(), z_hi - depth + kPreGraspOffset}, psi);
  plan.width = width;
  plan.height_above_bottom = height - depth;
  return plan;
}

}  // namespace splatsim
