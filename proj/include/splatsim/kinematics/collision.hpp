#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "splatsim/core/mesh.hpp"
#include "splatsim/core/scene.hpp"
#include "splatsim/geometry/bvh.hpp"
#include "splatsim/kinematics/chain.hpp"

namespace splatsim {

using BvhPtr = std::shared_ptr<const Bvh>;

// World-frame BVHs of the posed background mesh and of every object whose
// id is not in `exclude`. Empty meshes are skipped.
std::vector<BvhPtr> scene_obstacles(const Scene& scene, const std::vector<std::string>& exclude = {});

// Inward offset of the attached-object proxy, so resting contact with the
// table or a neighbor is not reported as a collision.
inline constexpr double kAttachedProxyShrink = 0.003;

// Validity predicate for planning: link capsules against the environment,
// non-adjacent link pairs against each other, and an optional object held
// in the gripper against the environment.
class CollisionChecker {
 public:
  CollisionChecker(KinematicChain chain, const Pose& base, std::vector<BvhPtr> obstacles);

  const KinematicChain& chain() const { return chain_; }
  const Pose& base() const { return base_; }

  void set_gripper_opening(double opening) { gripper_ = opening; }
  double gripper_opening() const { return gripper_; }

  // Mesh in the gripper frame; it is checked as a copy shrunk by
  // kAttachedProxyShrink per axis toward its bounding-box center.
  void attach(const TriangleMesh& mesh_in_gripper);
  void detach() { attached_.reset(); }
  bool has_attached() const { return attached_.has_value(); }

  bool in_collision(const Eigen::VectorXd& q) const;
  bool self_collision(const Eigen::VectorXd& q) const;
  bool environment_collision(const Eigen::VectorXd& q) const;
  // In limits and collision-free.
  bool valid(const Eigen::VectorXd& q) const { return chain_.within_limits(q) && !in_collision(q); }

 private:
  bool env_hit(const std::vector<std::vector<Capsule>>& caps) const;
  bool attached_hit(const FkResult& fk) const;

  KinematicChain chain_;
  Pose base_;
  std::vector<BvhPtr> obstacles_;
  double gripper_ = 0.0;
  std::optional<TriangleMesh> attached_;
};

// True iff a posed link capsule intersects an obstacle or two non-adjacent
// links' capsules intersect. The gripper counts as one link after the last
// joint.
bool config_in_collision(const KinematicChain& chain, const Eigen::VectorXd& q, double gripper, const Pose& base,
                         const std::vector<BvhPtr>& obstacles);

// Capsule-capsule overlap (distance between axes <= sum of radii).
bool capsules_intersect(const Capsule& a, const Capsule& b);

}  // namespace splatsim
