#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "splatsim/core/pose.hpp"
#include "splatsim/core/scene.hpp"
#include "splatsim/geometry/bvh.hpp"
#include "splatsim/kinematics/chain.hpp"

namespace splatsim {

// A grasp attaches only if the object's grasp point is this close to the
// tool center point.
inline constexpr double kGraspTolerance = 0.01;
// Full finger travel takes this many control steps.
inline constexpr int kGripperTravelSteps = 5;

struct Action {
  // Joint target, reached within the step.
  Eigen::VectorXd q;
  // Fraction of the maximum opening: 1 = open, 0 = closed.
  double gripper = 1.0;
};

struct SimState {
  Eigen::VectorXd q;
  double gripper = 0.0;  // finger opening, m
  // World poses, index-aligned with Simulator::objects().
  std::vector<Pose> object_poses;
  // Index of the held object, or -1.
  int attached = -1;
  // Held object's pose in the gripper frame.
  Pose attach_offset;
};

// Exact state exposed to the scripted policy.
struct PrivilegedObservation {
  std::vector<Pose> object_poses;
  Pose gripper_pose;
  double gripper_opening = 0.0;
  int attached = -1;
};

// Quasi-static kinematic world: joints follow their targets, a closing
// gripper attaches a graspable object lying between the fingers, and an
// opening gripper releases it onto the highest support directly below.
// Objects never move otherwise.
class Simulator {
 public:
  Simulator(KinematicChain chain, const Pose& robot_base, std::vector<RigidObject> objects,
            const TriangleMesh& background_world, double table_height);

  const KinematicChain& chain() const { return chain_; }
  const Pose& robot_base() const { return base_; }
  const std::vector<RigidObject>& objects() const { return objects_; }
  double table_height() const { return table_height_; }
  int object_index(const std::string& id) const;

  // Open gripper, nothing held, objects at their given poses.
  SimState initial_state(const Eigen::VectorXd& q) const;
  SimState step(const SimState& state, const Action& action) const;

  Pose gripper_pose(const Eigen::VectorXd& q) const;
  PrivilegedObservation observe(const SimState& state) const;

  // Objects at the state's poses.
  std::vector<RigidObject> posed_objects(const SimState& state) const;

  // Top of the highest support under the object's footprint, at or below
  // `max_z`: the table plane or another object's collision surface. The
  // object itself and `ignore` (if >= 0) are skipped.
  double support_below(const SimState& state, int object, const Pose& pose, double max_z, int ignore = -1) const;

  // `object` moved straight down onto support_below() its current bottom.
  Pose settled_pose(const SimState& state, int object) const;

  // Attachment audit: false iff the held object, shrunk by
  // kAttachedProxyShrink, intersects the background mesh.
  bool audit(const SimState& state) const;

 private:
  int find_graspable(const SimState& state, const Pose& tcp) const;

  KinematicChain chain_;
  Pose base_;
  std::vector<RigidObject> objects_;
  std::shared_ptr<const Bvh> background_;
  double table_height_ = 0.0;
};

// World AABB of a collision mesh at `pose`.
Aabb posed_bounds(const TriangleMesh& mesh, const Pose& pose);

// Yaw of an upright object frame.
double yaw_of(const Pose& pose);

}  // namespace splatsim
