#include "splatsim/demo/randomize.hpp"

#include <cmath>
#include <memory>
#include <mutex>

#include <fmt/format.h>

#include "splatsim/core/error.hpp"

namespace splatsim {

const Asset& cached_asset(const std::string& name) {
  static std::mutex mutex;
  static std::map<std::string, std::unique_ptr<const Asset>> cache;
  const std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, std::make_unique<const Asset>(make_asset(name))).first;
  return *it->second;
}

namespace {

// Object pose with its footprint center at `xy` and its bottom on the table.
Pose resting_pose(const Asset& asset, const Eigen::Vector2d& xy, double yaw, double table_height) {
  Pose pose = Pose::from_axis_angle(Eigen::Vector3d::UnitZ(), yaw, Eigen::Vector3d::Zero());
  Aabb box;
  for (const auto& v : asset.collision.vertices) box.extend(pose.apply(v));
  pose.translation = Eigen::Vector3d(xy.x() - box.center().x(), xy.y() - box.center().y(), table_height - box.min.z());
  return pose;
}

}  // namespace

bool layout_overlaps(const std::vector<RigidObject>& objects) {
  std::vector<Aabb> boxes;
  boxes.reserve(objects.size());
  for (const auto& o : objects) boxes.push_back(o.world_bounds());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    for (std::size_t j = i + 1; j < boxes.size(); ++j) {
      if (boxes[i].overlaps(boxes[j])) return true;
    }
  }
  return false;
}

std::vector<RigidObject> instantiate_task_objects(const TaskSpec& task, const std::vector<Pose>& poses) {
  if (poses.size() != task.objects.size()) {
    throw invalid_argument(fmt::format("{} poses for {} task objects", poses.size(), task.objects.size()));
  }
  std::vector<RigidObject> out;
  out.reserve(poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    out.push_back(instantiate(task.objects[i].id, cached_asset(task.objects[i].asset), poses[i]));
  }
  return out;
}

SceneInstance randomize_scene(const TaskSpec& task, Rng& rng, double table_height) {
  task.validate();
  SceneInstance inst;
  for (int attempt = 0;; ++attempt) {
    if (attempt >= task.max_layout_rejections) {
      throw Error(ErrorCategory::generation,
                  fmt::format("task {}: {} consecutive layouts had overlapping objects; the workspace is over-packed",
                              to_string(task.id), task.max_layout_rejections));
    }
    inst.objects.clear();
    inst.parameters.clear();
    for (const ObjectSpec& spec : task.objects) {
      const Eigen::Vector2d xy = spec.spawn.sample(rng);
      const double yaw = spec.random_yaw ? rng.uniform(-M_PI, M_PI) : 0.0;
      const Asset& asset = cached_asset(spec.asset);
      inst.objects.push_back(instantiate(spec.id, asset, resting_pose(asset, xy, yaw, table_height)));
      inst.parameters[spec.id + ".x"] = xy.x();
      inst.parameters[spec.id + ".y"] = xy.y();
      inst.parameters[spec.id + ".yaw"] = yaw;
    }
    if (!layout_overlaps(inst.objects)) {
      inst.rejected_layouts = attempt;
      break;
    }
  }
  const double r = task.base_offset_range;
  const double bx = rng.uniform(-r, r), by = rng.uniform(-r, r);
  inst.robot_base = Pose::from_translation({bx, by, 0.0});
  inst.parameters["base.x"] = bx;
  inst.parameters["base.y"] = by;
  return inst;
}

}  // namespace splatsim
