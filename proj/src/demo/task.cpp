#include "splatsim/demo/task.hpp"

#include <cmath>
#include <set>

#include <fmt/format.h>

#include "splatsim/core/error.hpp"
#include "splatsim/demo/assets.hpp"

namespace splatsim {

std::string to_string(TaskId id) {
  switch (id) {
    case TaskId::pick_drop: return "pick_drop";
    case TaskId::place_board: return "place_board";
    case TaskId::stack_blocks: return "stack_blocks";
    case TaskId::clear_table: return "clear_table";
  }
  return "unknown";
}

TaskId task_id_from_string(const std::string& name) {
  for (TaskId id : {TaskId::pick_drop, TaskId::place_board, TaskId::stack_blocks, TaskId::clear_table}) {
    if (to_string(id) == name) return id;
  }
  throw invalid_argument(fmt::format("unknown task '{}' (expected pick_drop, place_board, stack_blocks or clear_table)", name));
}

bool Rect::contains(const Eigen::Vector2d& p, double margin) const {
  const Eigen::Vector2d a = lo(), b = hi();
  return p.x() >= a.x() - margin && p.x() <= b.x() + margin && p.y() >= a.y() - margin && p.y() <= b.y() + margin;
}

bool Rect::contains(const Rect& other) const { return contains(other.lo()) && contains(other.hi()); }

Eigen::Vector2d Rect::sample(Rng& rng) const {
  const double x = rng.uniform(-0.5, 0.5), y = rng.uniform(-0.5, 0.5);
  return center + Eigen::Vector2d(x * size.x(), y * size.y());
}

void TaskSpec::validate() const {
  const std::string name = to_string(id);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw invalid_argument(fmt::format("task {}: dt must be positive", name));
  if (!(max_joint_velocity > 0.0)) throw invalid_argument(fmt::format("task {}: max_joint_velocity must be positive", name));
  if (max_steps == 0) throw invalid_argument(fmt::format("task {}: max_steps must be positive", name));
  if (!(base_offset_range >= 0.0)) throw invalid_argument(fmt::format("task {}: base_offset_range must be >= 0", name));
  if (max_layout_rejections < 1) throw invalid_argument(fmt::format("task {}: max_layout_rejections must be >= 1", name));
  if (!(table.size.x() > 0.0 && table.size.y() > 0.0)) throw invalid_argument(fmt::format("task {}: empty table", name));
  std::set<std::string> ids;
  for (const ObjectSpec& o : objects) {
    if (o.id.empty() || !ids.insert(o.id).second) throw invalid_argument(fmt::format("task {}: object ids must be unique and non-empty", name));
    if (!has_asset(o.asset)) throw invalid_argument(fmt::format("task {}: object '{}' uses unknown asset '{}'", name, o.id, o.asset));
    if (!(o.spawn.size.x() >= 0.0 && o.spawn.size.y() >= 0.0)) {
      throw invalid_argument(fmt::format("task {}: object '{}' has a negative spawn size", name, o.id));
    }
    if (!table.contains(o.spawn)) {
      throw invalid_argument(fmt::format("task {}: spawn rectangle of '{}' leaves the table", name, o.id));
    }
  }
  auto require = [&](const std::string& role, const char* what) {
    if (role.empty() || !ids.count(role)) throw invalid_argument(fmt::format("task {}: {} object '{}' is not defined", name, what, role));
  };
  switch (id) {
    case TaskId::pick_drop:
    case TaskId::clear_table:
      require(basket, "basket");
      if (object(basket).random_yaw) throw invalid_argument(fmt::format("task {}: the basket must not be yawed", name));
      break;
    case TaskId::place_board:
      require(board, "board");
      if (!(board_radius > 0.0)) throw invalid_argument(fmt::format("task {}: board_radius must be positive", name));
      break;
    case TaskId::stack_blocks:
      require(stack_base, "stack base");
      if (!(stack_xy_tolerance > 0.0 && stack_z_tolerance > 0.0)) throw invalid_argument(fmt::format("task {}: stack tolerances must be positive", name));
      break;
  }
  if (movable_objects().empty()) throw invalid_argument(fmt::format("task {}: nothing to move", name));
  for (const auto& m : movable_objects()) {
    if (!make_asset(object(m).asset).graspable) {
      throw invalid_argument(fmt::format("task {}: object '{}' must be graspable", name, m));
    }
  }
}

std::vector<std::string> TaskSpec::movable_objects() const {
  std::vector<std::string> out;
  for (const ObjectSpec& o : objects) {
    if (o.id == basket || o.id == board || o.id == stack_base) continue;
    out.push_back(o.id);
  }
  return out;
}

const ObjectSpec& TaskSpec::object(const std::string& object_id) const {
  for (const ObjectSpec& o : objects) {
    if (o.id == object_id) return o;
  }
  throw Error(ErrorCategory::not_found, fmt::format("task {} has no object '{}'", to_string(id), object_id));
}

namespace {

Rect rect(double cx, double cy, double sx, double sy) { return Rect{{cx, cy}, {sx, sy}}; }

}  // namespace

TaskSpec default_task(TaskId id) {
  TaskSpec t;
  t.id = id;
  t.table = rect(0.35, 0.0, 1.3, 1.6);
  switch (id) {
    case TaskId::pick_drop:
      t.objects = {{"bottle", "bottle", rect(0.5, 0.0, 0.25, 0.35), true},
                   {"basket", "basket", rect(0.45, -0.38, 0.0, 0.0), false}};
      t.basket = "basket";
      break;
    case TaskId::place_board:
      t.objects = {{"cucumber", "cucumber", rect(0.45, 0.15, 0.35, 0.50), true},
                   {"board", "board", rect(0.5, -0.1, 0.35, 0.80), true}};
      t.board = "board";
      break;
    case TaskId::stack_blocks:
      t.objects = {{"cube_red", "cube_red", rect(0.5, -0.15, 0.30, 0.10), true},
                   {"cube_green", "cube_green", rect(0.5, 0.0, 0.30, 0.10), true},
                   {"cube_blue", "cube_blue", rect(0.5, 0.15, 0.30, 0.10), true}};
      t.stack_base = "cube_red";
      break;
    case TaskId::clear_table: {
      const Rect area = rect(0.5, 0.05, 0.40, 0.50);
      for (const char* asset : {"cube_red", "cube_green", "cube_blue", "can", "puck", "block", "box_tall", "bottle_small"}) {
        t.objects.push_back({asset, asset, area, true});
      }
      t.objects.push_back({"basket", "basket", rect(0.45, -0.42, 0.0, 0.0), false});
      t.basket = "basket";
      t.max_steps = 6000;
      break;
    }
  }
  return t;
}

namespace {

Json rect_to_json(const Rect& r) {
  return Json{{"center", {r.center.x(), r.center.y()}}, {"size", {r.size.x(), r.size.y()}}};
}

Eigen::Vector2d vec2_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw invalid_argument(what + " must be [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Rect rect_from_json(const Json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("center") || !j.contains("size")) {
    throw invalid_argument(what + " must be {\"center\": [x, y], \"size\": [w, h]}");
  }
  return Rect{vec2_from_json(j["center"], what + ".center"), vec2_from_json(j["size"], what + ".size")};
}

}  // namespace

Json task_to_json(const TaskSpec& spec) {
  Json objects = Json::array();
  for (const ObjectSpec& o : spec.objects) {
    objects.push_back({{"id", o.id}, {"asset", o.asset}, {"spawn", rect_to_json(o.spawn)}, {"random_yaw", o.random_yaw}});
  }
  return Json{{"task", to_string(spec.id)},
              {"table", rect_to_json(spec.table)},
              {"objects", objects},
              {"basket", spec.basket},
              {"board", spec.board},
              {"board_radius", spec.board_radius},
              {"stack_base", spec.stack_base},
              {"stack_xy_tolerance", spec.stack_xy_tolerance},
              {"stack_z_tolerance", spec.stack_z_tolerance},
              {"base_offset_range", spec.base_offset_range},
              {"dt", spec.dt},
              {"max_steps", spec.max_steps},
              {"max_joint_velocity", spec.max_joint_velocity},
              {"max_layout_rejections", spec.max_layout_rejections}};
}

TaskSpec task_from_json(const Json& j) {
  if (!j.is_object()) throw invalid_argument("task spec must be a JSON object");
  TaskSpec t = default_task(task_id_from_string(json_string(j, "task", "task spec")));
  if (j.contains("table")) t.table = rect_from_json(j["table"], "table");
  if (j.contains("objects")) {
    if (!j["objects"].is_array()) throw invalid_argument("task spec: objects must be an array");
    t.objects.clear();
    for (std::size_t i = 0; i < j["objects"].size(); ++i) {
      const Json& o = j["objects"][i];
      const std::string what = fmt::format("objects[{}]", i);
      ObjectSpec spec;
      spec.id = json_string(o, "id", what);
      spec.asset = o.contains("asset") ? json_string(o, "asset", what) : spec.id;
      if (!o.contains("spawn")) throw invalid_argument(what + ": missing spawn rectangle");
      spec.spawn = rect_from_json(o["spawn"], what + ".spawn");
      spec.random_yaw = o.value("random_yaw", true);
      t.objects.push_back(spec);
    }
  }
  const std::string what = "task spec";
  t.basket = j.value("basket", t.basket);
  t.board = j.value("board", t.board);
  t.stack_base = j.value("stack_base", t.stack_base);
  t.board_radius = json_number_or(j, "board_radius", t.board_radius, what);
  t.stack_xy_tolerance = json_number_or(j, "stack_xy_tolerance", t.stack_xy_tolerance, what);
  t.stack_z_tolerance = json_number_or(j, "stack_z_tolerance", t.stack_z_tolerance, what);
  t.base_offset_range = json_number_or(j, "base_offset_range", t.base_offset_range, what);
  t.dt = json_number_or(j, "dt", t.dt, what);
  const double max_steps = json_number_or(j, "max_steps", static_cast<double>(t.max_steps), what);
  if (!(max_steps >= 1.0) || max_steps != std::floor(max_steps)) throw invalid_argument("task spec: max_steps must be a positive integer");
  t.max_steps = static_cast<std::size_t>(max_steps);
  t.max_joint_velocity = json_number_or(j, "max_joint_velocity", t.max_joint_velocity, what);
  t.max_layout_rejections = static_cast<int>(json_number_or(j, "max_layout_rejections", t.max_layout_rejections, what));
  t.validate();
  return t;
}

TaskSpec load_task(const std::string& path) {
  try {
    return task_from_json(read_json(path));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    if (e.category() != ErrorCategory::invalid_argument) throw;
    throw invalid_argument(fmt::format("{}: {}", path, e.what()));
  }
}

void save_task(const TaskSpec& spec, const std::string& path) {
  spec.validate();
  write_json(task_to_json(spec), path);
}

}  // namespace splatsim
