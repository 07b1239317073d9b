#include "splatsim/core/scene.hpp"

#include <set>

#include <fmt/format.h>

#include "splatsim/core/error.hpp"

namespace splatsim {

RigidObject RigidObject::make(std::string id, TriangleMesh visual, TriangleMesh collision, const Pose& pose,
                              bool graspable) {
  RigidObject obj;
  obj.id = std::move(id);
  obj.visual = std::move(visual);
  obj.collision = std::move(collision);
  obj.pose = pose;
  obj.graspable = graspable;
  obj.extents = obj.visual.bounds().extents();
  return obj;
}

void RigidObject::validate() const {
  if (id.empty()) throw invalid_argument("object id must not be empty");
  if (visual.empty()) throw invalid_argument("object '" + id + "' has an empty visual mesh");
  if (collision.empty()) throw invalid_argument("object '" + id + "' has an empty collision mesh");
  visual.validate();
  collision.validate();
  if ((visual.bounds().extents() - extents).cwiseAbs().maxCoeff() > 1e-9) {
    throw invalid_argument("object '" + id + "' extents do not match its visual mesh");
  }
}

Eigen::Vector3d RigidObject::local_center() const { return visual.bounds().center(); }

Aabb RigidObject::world_bounds() const {
  Aabb box;
  for (const auto& v : collision.vertices) box.extend(pose.apply(v));
  return box;
}

const CameraView& Scene::camera(const std::string& name) const {
  const auto it = cameras.find(name);
  if (it == cameras.end()) {
    std::string known;
    for (const auto& [k, v] : cameras) known += (known.empty() ? "" : ", ") + k;
    throw Error(ErrorCategory::not_found, fmt::format("unknown camera '{}' (available: {})", name, known));
  }
  return it->second;
}

CameraView& Scene::camera(const std::string& name) {
  return const_cast<CameraView&>(static_cast<const Scene&>(*this).camera(name));
}

const RigidObject* Scene::find_object(const std::string& id) const {
  for (const auto& obj : objects) {
    if (obj.id == id) return &obj;
  }
  return nullptr;
}

RigidObject* Scene::find_object(const std::string& id) {
  return const_cast<RigidObject*>(static_cast<const Scene&>(*this).find_object(id));
}

TriangleMesh Scene::background_mesh_world() const { return background_mesh.transformed(background.local_to_world); }

void Scene::validate() const {
  background.validate();
  if (!background_mesh.empty()) background_mesh.validate();
  std::set<std::string> ids;
  for (const auto& obj : objects) {
    obj.validate();
    if (!ids.insert(obj.id).second) throw invalid_argument("duplicate object id '" + obj.id + "'");
  }
  for (const auto& [name, cam] : cameras) cam.validate();
  for (const auto& [name, mount] : camera_mounts) {
    if (!cameras.count(name)) throw invalid_argument("camera mount '" + name + "' has no camera");
  }
}

}  // namespace splatsim
