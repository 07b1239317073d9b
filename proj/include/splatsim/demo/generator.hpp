#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "splatsim/core/scene.hpp"
#include "splatsim/dataset/episode_io.hpp"
#include "splatsim/demo/episode.hpp"
#include "splatsim/demo/task.hpp"
#include "splatsim/kinematics/chain.hpp"

namespace splatsim {

struct GenerateOptions {
  TaskSpec task;
  std::size_t episodes = 1;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out;
  // 0 = lossless PNG frames, 1..100 = JPEG quality.
  int quality = 40;
  // Without rendering only the low-dimensional logs are written.
  bool render = true;
  // Also write the world (splats, meshes, chain, manifest) to <out>/scene
  // and generate from its reloaded copy, which stores splats and the
  // background mesh at float32 precision.
  bool write_scene = true;
  // Rollouts tried per episode before generation aborts.
  int max_attempts = 20;
  RolloutParams rollout;
  // Called from worker threads, serialized.
  std::function<void(const std::string&)> progress;
};

struct GenerateReport {
  DatasetIndex index;
  std::size_t failed_rollouts = 0;
  std::size_t total_steps = 0;
  std::size_t frames = 0;
  double wall_seconds = 0.0;
  // Summed over workers.
  double simulate_seconds = 0.0;
  double render_seconds = 0.0;
  double write_seconds = 0.0;
};

// Rejection-sampled dataset: episode i tries seeds derive_seed(seed, i, a)
// for a = 0, 1, ... until a rollout succeeds, renders its frames from the
// logged states and writes <out>/ep_<i>. Episodes are claimed by `workers`
// threads; every output depends only on (options, world, chain). Writes
// index.txt, robot.json and task.json. If an episode exhausts max_attempts,
// Error(generation) lists the failure reasons.
GenerateReport generate_dataset(const GenerateOptions& options, const Scene& world, const KinematicChain& chain);

// Renders every step of a low-dimensional record into record.frames.
void render_episode_frames(EpisodeRecord& record, const TaskSpec& task, const Scene& world,
                           const KinematicChain& chain);

}  // namespace splatsim
