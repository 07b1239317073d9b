#pragma once

#include <optional>
#include <string>
#include <vector>

#include "splatsim/core/pose.hpp"
#include "splatsim/core/scene.hpp"
#include "splatsim/demo/sim.hpp"
#include "splatsim/demo/task.hpp"

namespace splatsim {

inline constexpr double kLiftHeight = 0.15;
inline constexpr double kRetreatHeight = 0.06;
// Gap between the held object's bottom and its support at release.
inline constexpr double kReleaseClearance = 0.01;
// Extra height over a basket rim at release.
inline constexpr double kRimClearance = 0.02;
// Control steps spent on each gripper event with the arm held still.
inline constexpr int kGripperEventSteps = 6;

enum class KeyposeKind { move, close, open };

struct Keypose {
  KeyposeKind kind = KeyposeKind::move;
  // World gripper pose; unused for gripper events.
  Pose pose;
  // Objects ignored as obstacles while moving to this pose.
  std::vector<std::string> exclude;
  std::string label;
};

// Pick-and-place of one object.
struct Stage {
  std::string object;
  std::vector<Keypose> keyposes;
  // Planned release pose of the object (before it settles).
  Pose release_object_pose;
};

struct Script {
  std::vector<Stage> stages;
  // Set when a predicted placement failed its predicate; no further stages
  // were emitted.
  std::optional<std::string> aborted;
};

std::size_t gripper_event_count(const Stage& stage);

// Order in which the task's movable objects are picked. clear_table picks
// by increasing horizontal distance to the robot base (ties by task order);
// the other tasks use task order.
std::vector<std::string> pick_order(const TaskSpec& task, const Simulator& sim, const SimState& state);

// Keyposes for moving `object` to its destination in stage `index`:
// pre-grasp, grasp, close, lift, release, open, retreat. Throws
// Error(generation) if the object cannot be grasped.
Stage plan_stage(const TaskSpec& task, const Simulator& sim, const SimState& state, const std::string& object,
                 std::size_t index);

// Whole script under ideal execution: each stage's object is assumed to end
// at its release pose settled onto its support. Stops after the first stage
// whose placement predicate fails.
Script plan_episode(const TaskSpec& task, const Simulator& sim, const SimState& state);

// Placement predicate for stage `index` on the given object poses.
bool placement_ok(const TaskSpec& task, const Simulator& sim, const SimState& state, const std::string& object,
                  std::size_t index);

// Terminal success predicate.
bool task_success(const TaskSpec& task, const Simulator& sim, const SimState& state);

// Basket interior cell for clear_table stage `index` (3 x 3 grid, row-major
// from the basket's -x, -y corner).
Eigen::Vector2d basket_cell(const RigidObject& basket, std::size_t index);

}  // namespace splatsim
