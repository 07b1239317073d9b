#pragma once

#include <cstdint>
#include <string>

#include "splatsim/core/scene.hpp"
#include "splatsim/dataset/episode.hpp"
#include "splatsim/demo/randomize.hpp"
#include "splatsim/demo/sim.hpp"
#include "splatsim/demo/task.hpp"
#include "splatsim/kinematics/chain.hpp"

namespace splatsim {

struct RolloutParams {
  int planner_iterations = 5000;
  int shortcut_attempts = 60;
};

struct Rollout {
  // Low-dimensional record (no frames); success mirrors the terminal
  // predicate.
  EpisodeRecord record;
  bool success = false;
  // Why the rollout was rejected; empty on success.
  std::string failure;
  // Stages whose placement predicate passed.
  std::size_t stages_completed = 0;
  int rejected_layouts = 0;
  // Wall time spent in IK and planning, seconds.
  double planning_seconds = 0.0;
};

// Simulator for a randomized instance in `world` (background mesh and
// table height).
Simulator make_simulator(const Scene& world, const KinematicChain& chain, const SceneInstance& instance);

// Randomizes the scene from `seed`, then executes the scripted policy stage
// by stage from the home configuration: keyposes are reached by IK seeded
// at the current configuration, RRT-Connect, shortcutting and time
// parameterization at the task's joint velocity limit; gripper events hold
// the arm for kGripperEventSteps. A failed IK, plan, grasp, audit,
// placement predicate or step budget ends the rollout unsuccessfully.
Rollout run_episode(const TaskSpec& task, const Scene& world, const KinematicChain& chain, std::uint64_t seed,
                    const RolloutParams& params = {});

struct ReplayResult {
  // Every re-simulated state matched the logged one.
  bool consistent = false;
  bool success = false;
  // Largest deviation seen (joints, opening and object translations, in
  // their own units).
  double max_deviation = 0.0;
  std::string message;
};

// Re-simulates a record from its first logged state by applying the logged
// actions, comparing every state within `tolerance` and re-evaluating the
// task predicate on the final state.
ReplayResult replay_episode(const TaskSpec& task, const Scene& world, const KinematicChain& chain,
                            const EpisodeRecord& record, double tolerance = 1e-9);

// Scene with the record's robot base and the object poses of step `k`.
Scene scene_at_step(const Scene& world, const TaskSpec& task, const EpisodeRecord& record, std::size_t k);

}  // namespace splatsim
