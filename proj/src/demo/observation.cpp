#include "splatsim/demo/observation.hpp"

#include <fmt/format.h>

#include "splatsim/core/error.hpp"
#include "splatsim/core/mesh_shapes.hpp"
#include "splatsim/render/compositor.hpp"

namespace splatsim {

namespace {

TriangleMesh capsule_mesh(const std::vector<Capsule>& capsules, const Eigen::Vector3d& color) {
  std::vector<TriangleMesh> parts;
  for (const Capsule& c : capsules) {
    // make_capsule needs distinct endpoints.
    const Eigen::Vector3d b = (c.b - c.a).norm() < 1e-9 ? Eigen::Vector3d(c.a + Eigen::Vector3d(0, 0, 1e-6)) : c.b;
    parts.push_back(make_capsule(c.a, b, c.radius, 16, 4));
  }
  TriangleMesh m = parts.empty() ? TriangleMesh{} : merge_meshes(parts);
  paint(m, color);
  return m;
}

}  // namespace

RobotVisual::RobotVisual(const KinematicChain& chain) : chain_(chain) {
  const Eigen::Vector3d white(0.93, 0.93, 0.92), dark(0.25, 0.25, 0.28);
  for (std::size_t i = 0; i < chain.link_capsules.size(); ++i) {
    links_.push_back(capsule_mesh(chain.link_capsules[i], i == 0 || i + 1 == chain.link_capsules.size() ? dark : white));
  }
  hand_ = capsule_mesh(chain.hand_capsules, white);
  finger_ = capsule_mesh({chain.finger}, dark);
}

std::vector<MeshInstance> RobotVisual::instances(const Eigen::VectorXd& q, double gripper, const Pose& base) const {
  const FkResult fk = forward_kinematics(chain_, q, base);
  std::vector<MeshInstance> out;
  for (std::size_t i = 0; i < links_.size() && i < fk.links.size(); ++i) {
    if (!links_[i].faces.empty()) out.push_back({&links_[i], fk.links[i]});
  }
  if (!hand_.faces.empty()) out.push_back({&hand_, fk.gripper});
  const double half = 0.5 * gripper;
  out.push_back({&finger_, fk.gripper * Pose::from_translation({0, half, 0})});
  // Mirror in y of the +y finger: a half turn about the gripper z axis
  // (the finger lies in the x = 0 plane).
  out.push_back({&finger_, fk.gripper * Pose::from_axis_angle(Eigen::Vector3d::UnitZ(), M_PI) *
                               Pose::from_translation({0, half, 0})});
  return out;
}

std::map<std::string, CameraView> posed_cameras(const Scene& scene, const KinematicChain& chain,
                                                const Eigen::VectorXd& q) {
  std::map<std::string, CameraView> out = scene.cameras;
  if (scene.camera_mounts.empty()) return out;
  const FkResult fk = forward_kinematics(chain, q, scene.robot_base);
  for (const auto& [name, mount] : scene.camera_mounts) {
    auto it = out.find(name);
    if (it == out.end()) continue;
    if (!has_frame(chain, mount.frame)) {
      throw invalid_argument(fmt::format("camera '{}' is mounted on unknown frame '{}'", name, mount.frame));
    }
    it->second = it->second.with_camera_pose(frame_pose(chain, fk, mount.frame) * mount.frame_to_camera);
  }
  return out;
}

std::map<std::string, Image8> render_observation(const Scene& scene, const RobotVisual& robot,
                                                 const KinematicChain& chain, const Eigen::VectorXd& q,
                                                 double gripper, const std::vector<std::string>& cameras) {
  const auto posed = posed_cameras(scene, chain, q);
  const auto meshes = robot.instances(q, gripper, scene.robot_base);
  std::vector<std::string> names = cameras;
  if (names.empty()) {
    for (const auto& [name, cam] : posed) names.push_back(name);
  }
  std::map<std::string, Image8> out;
  for (const auto& name : names) {
    auto it = posed.find(name);
    if (it == posed.end()) scene.camera(name);  // throws not_found listing the cameras
    out[name] = to_image8(render_view(it->second, scene, meshes));
  }
  return out;
}

}  // namespace splatsim
