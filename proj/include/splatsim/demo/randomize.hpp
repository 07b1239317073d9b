#pragma once

#include <map>
#include <string>
#include <vector>

#include "splatsim/core/rng.hpp"
#include "splatsim/core/scene.hpp"
#include "splatsim/demo/assets.hpp"
#include "splatsim/demo/task.hpp"

namespace splatsim {

struct SceneInstance {
  // Posed objects in task order.
  std::vector<RigidObject> objects;
  Pose robot_base;
  // "<id>.x", "<id>.y", "<id>.yaw", "base.x", "base.y".
  std::map<std::string, double> parameters;
  // Layouts rejected before this one was accepted.
  int rejected_layouts = 0;
};

// Shared, immutable copy of a built-in asset.
const Asset& cached_asset(const std::string& name);

// Samples every object's footprint center uniformly in its spawn rectangle
// with uniform yaw in [-pi, pi) (fixed objects keep yaw 0), resting on the
// table, then the robot base offset uniformly in +-base_offset_range per
// axis. Layouts where two objects' world AABBs overlap are resampled; after
// max_layout_rejections consecutive rejections Error(generation) is thrown.
SceneInstance randomize_scene(const TaskSpec& task, Rng& rng, double table_height = 0.0);

// Objects from `task` placed at the given poses (index-aligned with
// task.objects).
std::vector<RigidObject> instantiate_task_objects(const TaskSpec& task, const std::vector<Pose>& poses);

// True iff some pair of objects has overlapping world AABBs.
bool layout_overlaps(const std::vector<RigidObject>& objects);

}  // namespace splatsim
