#pragma once

#include <cstdint>

#include "splatsim/core/scene.hpp"
#include "splatsim/demo/task.hpp"
#include "splatsim/kinematics/chain.hpp"

namespace splatsim {

// Published per-step breakdown (ms) of a GPU physics + splatting pipeline,
// printed next to our measurements for orientation only.
struct TimingReference {
  static constexpr double physics_ms = 26.64;
  static constexpr double render_ms = 12.93;
  static constexpr double planning_ms = 0.36;
  static constexpr double other_ms = 1.53;
  static constexpr double total_ms = 41.46;
};

// Mean wall time per persisted step.
struct TimingReport {
  // Scene stepping: randomization, simulation, grasp logic, audits.
  double physics_ms = 0.0;
  // Rendering every camera.
  double render_ms = 0.0;
  // IK, planning, shortcutting and time parameterization (amortized).
  double planning_ms = 0.0;
  // Frame encoding and bookkeeping.
  double other_ms = 0.0;
  // Measured independently around the whole loop.
  double total_ms = 0.0;
  std::size_t steps = 0;
  std::size_t rollouts = 0;
  std::size_t failed_rollouts = 0;
  int width = 0;
  int height = 0;
  std::size_t cameras = 0;
  std::size_t splats = 0;
  // Size of all encoded frames.
  std::size_t encoded_bytes = 0;

  double component_sum() const { return physics_ms + render_ms + planning_ms + other_ms; }
  // |sum - total| / total.
  double accounting_error() const;
};

struct BenchOptions {
  // Minimum number of persisted steps; whole rollouts are run.
  std::size_t steps = 100;
  std::uint64_t seed = 0;
  // JPEG quality for the encoding stage (0 = PNG).
  int quality = 40;
};

// Runs the single-worker generation loop (rollout, render all cameras,
// encode) until at least options.steps steps are persisted and reports the
// per-step breakdown. Failed rollouts count toward physics and planning.
TimingReport bench(const Scene& world, const KinematicChain& chain, const TaskSpec& task,
                   const BenchOptions& options = {});

}  // namespace splatsim
