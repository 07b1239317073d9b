#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "splatsim/core/json_util.hpp"
#include "splatsim/core/rng.hpp"

namespace splatsim {

enum class TaskId { pick_drop, place_board, stack_blocks, clear_table };

std::string to_string(TaskId id);
TaskId task_id_from_string(const std::string& name);

// Axis-aligned rectangle in the table plane (world x, y; meters). A zero
// size pins the sample to the center.
struct Rect {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  Eigen::Vector2d size = Eigen::Vector2d::Zero();

  Eigen::Vector2d lo() const { return center - 0.5 * size; }
  Eigen::Vector2d hi() const { return center + 0.5 * size; }
  bool contains(const Eigen::Vector2d& p, double margin = 0.0) const;
  bool contains(const Rect& other) const;
  Eigen::Vector2d sample(Rng& rng) const;
};

struct ObjectSpec {
  std::string id;
  // Built-in asset name (see asset_names()).
  std::string asset;
  Rect spawn;
  bool random_yaw = true;
};

struct TaskSpec {
  TaskId id = TaskId::pick_drop;
  // Objects to pick, in task order, followed by fixed or randomized props
  // such as the basket or the board.
  std::vector<ObjectSpec> objects;
  Rect table;
  // pick_drop / clear_table: id of the receptacle object; success needs
  // each delivered object's center inside its inner region.
  std::string basket;
  // place_board: id of the board; success needs the object center within
  // board_radius of the board center (horizontal distance).
  std::string board;
  double board_radius = 0.06;
  // stack_blocks: the block left in place; the movable blocks are stacked
  // on it in order.
  std::string stack_base;
  // stack_blocks: horizontal alignment and height tolerances.
  double stack_xy_tolerance = 0.01;
  double stack_z_tolerance = 0.005;
  // Uniform planar offset of the robot base, +-range per axis.
  double base_offset_range = 0.02;
  double dt = 0.05;
  std::size_t max_steps = 1200;
  double max_joint_velocity = 1.0;
  // Consecutive rejected layouts before randomization gives up.
  int max_layout_rejections = 1000;

  // Rectangles inside the table, dt > 0, known assets, unique ids, and the
  // task's required roles present.
  void validate() const;

  // Ids of the objects the script moves, in nominal order.
  std::vector<std::string> movable_objects() const;
  const ObjectSpec& object(const std::string& id) const;
};

TaskSpec default_task(TaskId id);

Json task_to_json(const TaskSpec& spec);
TaskSpec task_from_json(const Json& j);
TaskSpec load_task(const std::string& path);
void save_task(const TaskSpec& spec, const std::string& path);

}  // namespace splatsim
