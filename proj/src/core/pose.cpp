#include "splatsim/core/pose.hpp"

#include <algorithm>
#include <cmath>

#include "splatsim/core/error.hpp"

namespace splatsim {

std::string_view category_name(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::invalid_argument: return "invalid_argument";
    case ErrorCategory::not_found: return "not_found";
    case ErrorCategory::io: return "io";
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::convergence: return "convergence";
    case ErrorCategory::planning: return "planning";
    case ErrorCategory::generation: return "generation";
  }
  return "unknown";
}

namespace {

std::string describe_location(ParseError::Unit unit, std::size_t location) {
  return unit == ParseError::Unit::line ? "line " + std::to_string(location)
                                        : "byte offset " + std::to_string(location);
}

}  // namespace

ParseError::ParseError(const std::string& path, Unit unit, std::size_t location,
                       const std::string& what)
    : Error(ErrorCategory::parse, path + ": " + describe_location(unit, location) + ": " + what),
      path_(path),
      unit_(unit),
      location_(location) {}

Pose::Pose(const Eigen::Quaterniond& q, const Eigen::Vector3d& t)
    : rotation(q.normalized()), translation(t) {}

Pose Pose::from_translation(const Eigen::Vector3d& t) {
  return Pose(Eigen::Quaterniond::Identity(), t);
}

Pose Pose::from_axis_angle(const Eigen::Vector3d& axis, double angle, const Eigen::Vector3d& t) {
  return Pose(Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis.normalized())), t);
}

Pose Pose::from_rotation_matrix(const Eigen::Matrix3d& r, const Eigen::Vector3d& t) {
  return Pose(Eigen::Quaterniond(r), t);
}

Pose Pose::from_matrix(const Eigen::Matrix4d& m) {
  return from_rotation_matrix(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
}

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_matrix();
  m.topRightCorner<3, 1>() = translation;
  return m;
}

Pose Pose::inverse() const {
  Pose out;
  out.rotation = rotation.conjugate();
  out.translation = -(out.rotation * translation);
  return out;
}

Pose compose(const Pose& a, const Pose& b) {
  Pose out;
  out.rotation = (a.rotation * b.rotation).normalized();
  out.translation = a.rotation * b.translation + a.translation;
  return out;
}

double rotation_distance(const Pose& a, const Pose& b) {
  return a.rotation.angularDistance(b.rotation);
}

double translation_distance(const Pose& a, const Pose& b) {
  return (a.translation - b.translation).norm();
}

Eigen::Vector3d rotation_error(const Eigen::Quaterniond& from, const Eigen::Quaterniond& to) {
  Eigen::Quaterniond d = (to * from.conjugate()).normalized();
  if (d.w() < 0.0) d.coeffs() *= -1.0;
  const double s = d.vec().norm();
  if (s < 1e-12) return 2.0 * d.vec();
  const double angle = 2.0 * std::atan2(s, d.w());
  return d.vec() * (angle / s);
}

Eigen::Quaterniond quaternion_from_rotation_vector(const Eigen::Vector3d& omega) {
  const double angle = omega.norm();
  if (angle < 1e-12) {
    Eigen::Quaterniond q(1.0, 0.5 * omega.x(), 0.5 * omega.y(), 0.5 * omega.z());
    return q.normalized();
  }
  return Eigen::Quaterniond(Eigen::AngleAxisd(angle, omega / angle));
}

bool is_unit_quaternion(const Eigen::Quaterniond& q, double tol) {
  return std::abs(q.norm() - 1.0) <= tol;
}

}  // namespace splatsim
