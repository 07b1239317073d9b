#pragma once

#include <map>
#include <string>
#include <vector>

#include "splatsim/core/camera.hpp"
#include "splatsim/core/gaussian.hpp"
#include "splatsim/core/mesh.hpp"
#include "splatsim/core/pose.hpp"

namespace splatsim {

// Meshes are stored in the object frame; `pose` maps object to world.
struct RigidObject {
  std::string id;
  TriangleMesh visual;
  TriangleMesh collision;
  Pose pose;
  bool graspable = true;
  // Side lengths of the visual mesh AABB in the object frame.
  Eigen::Vector3d extents = Eigen::Vector3d::Zero();

  // Fills `extents` from the visual mesh.
  static RigidObject make(std::string id, TriangleMesh visual, TriangleMesh collision, const Pose& pose,
                          bool graspable);

  void validate() const;
  // Visual-mesh AABB center in the object frame.
  Eigen::Vector3d local_center() const;
  // Tight world AABB of the posed collision mesh.
  Aabb world_bounds() const;
};

// A camera rigidly attached to a named robot frame; the world pose is
// refreshed from kinematics before each render.
struct CameraMount {
  std::string frame;
  Pose frame_to_camera;
};

struct Scene {
  // Splats and the background collision mesh share background.local_to_world.
  GaussianCloud background;
  TriangleMesh background_mesh;
  std::vector<RigidObject> objects;
  std::map<std::string, CameraView> cameras;
  std::map<std::string, CameraMount> camera_mounts;
  Pose robot_base;
  double table_height = 0.0;

  // Throws not_found naming the available cameras.
  const CameraView& camera(const std::string& name) const;
  CameraView& camera(const std::string& name);

  const RigidObject* find_object(const std::string& id) const;
  RigidObject* find_object(const std::string& id);

  TriangleMesh background_mesh_world() const;

  // Unique object ids, valid meshes and cameras.
  void validate() const;
};

}  // namespace splatsim
