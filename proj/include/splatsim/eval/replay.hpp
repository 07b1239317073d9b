#pragma once

#include <string>
#include <vector>

#include "splatsim/core/pose.hpp"
#include "splatsim/core/scene.hpp"
#include "splatsim/dataset/episode.hpp"
#include "splatsim/demo/task.hpp"
#include "splatsim/kinematics/chain.hpp"

namespace splatsim {

struct FrameMetric {
  std::string camera;
  std::size_t step = 0;
  double psnr = 0.0;
  double ssim = 0.0;
};

struct MetricReport {
  // What was compared, printed with the table.
  std::string label;
  std::vector<FrameMetric> frames;
  std::size_t count = 0;
  double mean_psnr = 0.0;
  double std_psnr = 0.0;
  double mean_ssim = 0.0;
  double std_ssim = 0.0;
};

// Fills count, means and population standard deviations from `frames`.
MetricReport summarize(std::string label, std::vector<FrameMetric> frames);

struct ReplayCompareOptions {
  // Cameras to compare; all stored cameras when empty.
  std::vector<std::string> cameras;
  // Compare every stride-th step.
  std::size_t stride = 1;
  // Applied on the left of the background's local-to-world pose before
  // re-rendering (identity for a faithful replay).
  Pose scene_perturbation;
};

// Re-renders every compared step from the logged joints, gripper opening
// and object poses, and scores the stored frames against it. A requested
// camera missing from the record or the scene raises not_found.
MetricReport replay_compare(const EpisodeRecord& stored, const TaskSpec& task, const Scene& world,
                            const KinematicChain& chain, const ReplayCompareOptions& options = {});

// Reads the episode (with frames) from `episode_dir` first.
MetricReport replay_compare(const std::string& episode_dir, const TaskSpec& task, const Scene& world,
                            const KinematicChain& chain, const ReplayCompareOptions& options = {});

}  // namespace splatsim
