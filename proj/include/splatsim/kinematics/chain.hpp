#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "splatsim/core/pose.hpp"

namespace splatsim {

// Segment-swept sphere in a link frame.
struct Capsule {
  Eigen::Vector3d a = Eigen::Vector3d::Zero();
  Eigen::Vector3d b = Eigen::Vector3d::Zero();
  double radius = 0.0;
};

// Revolute joint. Its frame is origin * Rot(axis, q) relative to the
// previous link frame.
struct Joint {
  std::string name;
  Pose origin;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  double lower = 0.0;
  double upper = 0.0;
};

struct JointConfig {
  Eigen::VectorXd q;
  double gripper = 0.0;  // finger opening, m
};

struct KinematicChain {
  std::vector<Joint> joints;
  // link_capsules[0] is the base link, link_capsules[i] moves with joint i.
  std::vector<std::vector<Capsule>> link_capsules;
  // Last link frame to the gripper (tool center point) frame; the gripper
  // approach direction is its +z axis.
  Pose flange_to_gripper;
  double gripper_max_opening = 0.08;
  // Gripper-frame capsules of the hand body.
  std::vector<Capsule> hand_capsules;
  // Finger on the +y side at zero opening; it moves by +opening/2 along y
  // and the other finger is its mirror image in y.
  Capsule finger;
  Eigen::VectorXd home;

  std::size_t dof() const { return joints.size(); }
  Eigen::VectorXd lower_limits() const;
  Eigen::VectorXd upper_limits() const;
  bool within_limits(const Eigen::VectorXd& q, double tol = 0.0) const;
  Eigen::VectorXd clamp(const Eigen::VectorXd& q) const;

  // lo < hi, unit axes, positive radii, sizes consistent, home in limits.
  void validate() const;
};

struct FkResult {
  // links[0] is the base frame, links[i] the frame of joint i.
  std::vector<Pose> links;
  Pose gripper;
};

// Poses relative to `base` (the robot base in the world, or identity).
// Throws invalid_argument on a dimension mismatch.
FkResult forward_kinematics(const KinematicChain& chain, const Eigen::VectorXd& q, const Pose& base = Pose());

// Geometric Jacobian of the gripper frame in the base frame: rows 0-2 are
// linear velocity, rows 3-5 angular velocity.
Eigen::MatrixXd jacobian(const KinematicChain& chain, const Eigen::VectorXd& q);

// Named frames: "base", "link1".."linkN", "gripper".
Pose frame_pose(const KinematicChain& chain, const FkResult& fk, const std::string& frame);
bool has_frame(const KinematicChain& chain, const std::string& frame);

// World-frame capsules of every link plus the hand and both fingers; the
// last three groups form one extra link after the final joint.
std::vector<std::vector<Capsule>> posed_capsules(const KinematicChain& chain, const FkResult& fk, double gripper);

// 7-DoF arm with Franka-class proportions (modified DH), capsule geometry
// and a parallel gripper.
KinematicChain franka_like_chain();

}  // namespace splatsim
