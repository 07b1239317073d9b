#include "splatsim/demo/script.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "splatsim/core/error.hpp"
#include "splatsim/demo/assets.hpp"
#include "splatsim/demo/grasp.hpp"

namespace splatsim {

namespace {

RigidObject posed(const Simulator& sim, const SimState& state, int index) {
  RigidObject o = sim.objects()[index];
  o.pose = state.object_poses[index];
  return o;
}

Aabb bounds_of(const Simulator& sim, const SimState& state, int index) {
  return posed_bounds(sim.objects()[index].collision, state.object_poses[index]);
}

// Wraps an angle into [-pi/4, pi/4); footprints here are symmetric under
// quarter turns as far as placement is concerned.
double wrap_quarter(double a) {
  a = std::fmod(a + M_PI / 4, M_PI / 2);
  if (a < 0) a += M_PI / 2;
  return a - M_PI / 4;
}

bool in_basket(const Simulator& sim, const SimState& state, int object, int basket) {
  const Aabb o = bounds_of(sim, state, object);
  const Aabb b = bounds_of(sim, state, basket);
  const Rect inner = basket_inner_region(posed(sim, state, basket));
  return state.attached != object && inner.contains(o.center().head<2>()) && o.min.z() < b.max.z();
}

// Block below `object` in a stack, by pick order.
std::string stack_support(const TaskSpec& task, const std::string& object) {
  const auto order = task.movable_objects();
  const auto it = std::find(order.begin(), order.end(), object);
  if (it == order.end()) throw invalid_argument(fmt::format("'{}' is not a stacked block", object));
  return it == order.begin() ? task.stack_base : *(it - 1);
}

bool stacked_on(const TaskSpec& task, const Simulator& sim, const SimState& state, int upper, int lower) {
  if (state.attached == upper) return false;
  const Aabb u = bounds_of(sim, state, upper);
  const Aabb l = bounds_of(sim, state, lower);
  const double dxy = (u.center().head<2>() - l.center().head<2>()).norm();
  const double dz = u.min.z() - l.min.z();
  return dxy <= task.stack_xy_tolerance && std::abs(dz - l.extents().z()) <= task.stack_z_tolerance;
}

}  // namespace

std::size_t gripper_event_count(const Stage& stage) {
  return static_cast<std::size_t>(std::count_if(stage.keyposes.begin(), stage.keyposes.end(),
                                                [](const Keypose& k) { return k.kind != KeyposeKind::move; }));
}

Eigen::Vector2d basket_cell(const RigidObject& basket, std::size_t index) {
  if (index >= 9) throw invalid_argument(fmt::format("basket cell {} out of range (9 cells)", index));
  const Rect inner = basket_inner_region(basket);
  const Eigen::Vector2d cell = inner.size / 3.0;
  const double cx = static_cast<double>(index % 3) + 0.5, cy = static_cast<double>(index / 3) + 0.5;
  return inner.lo() + Eigen::Vector2d(cx * cell.x(), cy * cell.y());
}

std::vector<std::string> pick_order(const TaskSpec& task, const Simulator& sim, const SimState& state) {
  std::vector<std::string> order = task.movable_objects();
  if (task.id != TaskId::clear_table) return order;
  const Eigen::Vector2d base = sim.robot_base().translation.head<2>();
  std::vector<double> dist;
  for (const auto& id : order) dist.push_back((bounds_of(sim, state, sim.object_index(id)).center().head<2>() - base).norm());
  std::vector<std::size_t> idx(order.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
  std::vector<std::string> sorted;
  for (std::size_t i : idx) sorted.push_back(order[i]);
  return sorted;
}

Stage plan_stage(const TaskSpec& task, const Simulator& sim, const SimState& state, const std::string& object,
                 std::size_t index) {
  const int oi = sim.object_index(object);
  const RigidObject obj = posed(sim, state, oi);
  const GraspPlan grasp = compute_grasp(obj, sim.chain().gripper_max_opening);
  const Pose offset = grasp.grasp.inverse() * obj.pose;

  // Destination: footprint center, target yaw (if any) and a floor for the
  // release height.
  Eigen::Vector2d target_xy;
  std::optional<double> target_yaw;
  double min_bottom = -std::numeric_limits<double>::infinity();
  switch (task.id) {
    case TaskId::pick_drop:
    case TaskId::clear_table: {
      const int bi = sim.object_index(task.basket);
      const RigidObject basket = posed(sim, state, bi);
      target_xy = task.id == TaskId::pick_drop ? basket_inner_region(basket).center : basket_cell(basket, index);
      target_yaw = yaw_of(basket.pose);
      min_bottom = bounds_of(sim, state, bi).max.z() + kRimClearance;
      break;
    }
    case TaskId::place_board:
      target_xy = bounds_of(sim, state, sim.object_index(task.board)).center().head<2>();
      break;
    case TaskId::stack_blocks: {
      const int below = sim.object_index(stack_support(task, object));
      target_xy = bounds_of(sim, state, below).center().head<2>();
      target_yaw = yaw_of(state.object_poses[below]);
      break;
    }
  }

  const double delta = target_yaw ? wrap_quarter(*target_yaw - yaw_of(obj.pose)) : 0.0;
  Pose release = Pose::from_axis_angle(Eigen::Vector3d::UnitZ(), delta, Eigen::Vector3d::Zero()) * obj.pose;
  release.translation.setZero();
  const Aabb box = posed_bounds(obj.collision, release);
  release.translation = Eigen::Vector3d(target_xy.x() - box.center().x(), target_xy.y() - box.center().y(), -box.min.z());
  const double support = sim.support_below(state, oi, release, std::numeric_limits<double>::infinity());
  release.translation.z() += std::max(support + kReleaseClearance, min_bottom);

  const Pose release_gripper = release * offset.inverse();
  const Eigen::Vector3d up = Eigen::Vector3d::UnitZ();
  Pose lift = grasp.grasp;
  lift.translation += kLiftHeight * up;
  Pose retreat = release_gripper;
  retreat.translation += kRetreatHeight * up;

  Stage stage;
  stage.object = object;
  stage.release_object_pose = release;
  const std::vector<std::string> self = {object};
  stage.keyposes = {
      {KeyposeKind::move, grasp.pre_grasp, {}, "pre_grasp"},
      {KeyposeKind::move, grasp.grasp, self, "grasp"},
      {KeyposeKind::close, Pose(), {}, "close"},
      {KeyposeKind::move, lift, self, "lift"},
      {KeyposeKind::move, release_gripper, self, "release"},
      {KeyposeKind::open, Pose(), {}, "open"},
      {KeyposeKind::move, retreat, self, "retreat"},
  };
  return stage;
}

bool placement_ok(const TaskSpec& task, const Simulator& sim, const SimState& state, const std::string& object,
                  std::size_t /*index*/) {
  const int oi = sim.object_index(object);
  switch (task.id) {
    case TaskId::pick_drop:
    case TaskId::clear_table:
      return in_basket(sim, state, oi, sim.object_index(task.basket));
    case TaskId::place_board: {
      if (state.attached == oi) return false;
      const Aabb o = bounds_of(sim, state, oi);
      const Aabb b = bounds_of(sim, state, sim.object_index(task.board));
      return (o.center().head<2>() - b.center().head<2>()).norm() <= task.board_radius;
    }
    case TaskId::stack_blocks:
      return stacked_on(task, sim, state, oi, sim.object_index(stack_support(task, object)));
  }
  return false;
}

bool task_success(const TaskSpec& task, const Simulator& sim, const SimState& state) {
  if (state.attached >= 0) return false;
  const auto order = task.movable_objects();
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!placement_ok(task, sim, state, order[i], i)) return false;
  }
  return true;
}

Script plan_episode(const TaskSpec& task, const Simulator& sim, const SimState& state) {
  Script script;
  SimState s = state;
  const auto order = pick_order(task, sim, state);
  for (std::size_t i = 0; i < order.size(); ++i) {
    Stage stage = plan_stage(task, sim, s, order[i], i);
    const int oi = sim.object_index(order[i]);
    s.object_poses[oi] = stage.release_object_pose;
    s.object_poses[oi] = sim.settled_pose(s, oi);
    script.stages.push_back(std::move(stage));
    if (!placement_ok(task, sim, s, order[i], i)) {
      script.aborted = fmt::format("predicted placement of '{}' fails", order[i]);
      break;
    }
  }
  return script;
}

}  // namespace splatsim
