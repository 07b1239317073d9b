#pragma once

#include <map>
#include <string>
#include <vector>

#include "splatsim/core/image.hpp"
#include "splatsim/core/scene.hpp"
#include "splatsim/kinematics/chain.hpp"
#include "splatsim/render/mesh_rasterizer.hpp"

namespace splatsim {

// Renderable robot: one mesh per link built from its collision capsules,
// plus hand and finger meshes in the gripper frame.
class RobotVisual {
 public:
  explicit RobotVisual(const KinematicChain& chain);

  // Mesh instances for joint configuration q and finger opening, with the
  // robot base at `base`. The returned instances point into this object.
  std::vector<MeshInstance> instances(const Eigen::VectorXd& q, double gripper, const Pose& base) const;

 private:
  KinematicChain chain_;
  std::vector<TriangleMesh> links_;
  TriangleMesh hand_;
  TriangleMesh finger_;
};

// Pose of every mounted camera for the given robot state; unmounted cameras
// are returned unchanged.
std::map<std::string, CameraView> posed_cameras(const Scene& scene, const KinematicChain& chain,
                                                const Eigen::VectorXd& q);

// Renders `cameras` (all scene cameras when empty) with the robot drawn at
// (q, gripper). Object poses and the robot base are taken from `scene`.
std::map<std::string, Image8> render_observation(const Scene& scene, const RobotVisual& robot,
                                                 const KinematicChain& chain, const Eigen::VectorXd& q,
                                                 double gripper, const std::vector<std::string>& cameras = {});

}  // namespace splatsim
