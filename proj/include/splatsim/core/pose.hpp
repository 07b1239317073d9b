#pragma once

#include <Eigen/Geometry>

namespace splatsim {

// Rigid transform with a unit quaternion stored (w,x,y,z) and a translation
// in meters. A pose maps points from its local frame into its parent frame:
// p_parent = R * p_local + t.
struct Pose {
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Pose() = default;
  // The quaternion is normalized on construction.
  Pose(const Eigen::Quaterniond& q, const Eigen::Vector3d& t);

  static Pose identity() { return {}; }
  static Pose from_translation(const Eigen::Vector3d& t);
  static Pose from_axis_angle(const Eigen::Vector3d& axis, double angle,
                              const Eigen::Vector3d& t = Eigen::Vector3d::Zero());
  static Pose from_rotation_matrix(const Eigen::Matrix3d& r,
                                   const Eigen::Vector3d& t = Eigen::Vector3d::Zero());
  static Pose from_matrix(const Eigen::Matrix4d& m);

  Eigen::Matrix3d rotation_matrix() const { return rotation.toRotationMatrix(); }
  Eigen::Matrix4d matrix() const;

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }
  Eigen::Vector3d rotate(const Eigen::Vector3d& v) const { return rotation * v; }

  Pose inverse() const;
};

// Applies b first, then a.
Pose compose(const Pose& a, const Pose& b);

inline Pose operator*(const Pose& a, const Pose& b) { return compose(a, b); }

// Geodesic angle of a.rotation^-1 * b.rotation, in [0, pi].
double rotation_distance(const Pose& a, const Pose& b);
double translation_distance(const Pose& a, const Pose& b);

// Rotation vector (axis * angle) of the relative rotation taking a to b,
// expressed in the parent frame: log(R_b * R_a^T).
Eigen::Vector3d rotation_error(const Eigen::Quaterniond& from, const Eigen::Quaterniond& to);

// Exact exponential map of a rotation vector.
Eigen::Quaterniond quaternion_from_rotation_vector(const Eigen::Vector3d& omega);

bool is_unit_quaternion(const Eigen::Quaterniond& q, double tol = 1e-9);

}  // namespace splatsim
