#pragma once

#include <string>
#include <vector>

#include "splatsim/dataset/episode.hpp"
#include "splatsim/dataset/episode_io.hpp"
#include "splatsim/kinematics/chain.hpp"

namespace splatsim {

struct StepSample {
  std::size_t episode = 0;
  std::size_t step = 0;
  double value = 0.0;
};

struct InitialPosition {
  std::size_t episode = 0;
  std::string object;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
};

struct DatasetStats {
  std::vector<std::size_t> episode_lengths;
  // Angle (rad) between the gripper approach axis and gravity, per step.
  std::vector<StepSample> gripper_angles;
  // World end-effector distance between steps k-1 and k, for k >= 1.
  std::vector<StepSample> ee_displacements;
  std::vector<InitialPosition> initial_positions;
};

// Throws invalid_argument for an empty episode list.
DatasetStats compute_stats(const std::vector<EpisodeRecord>& episodes, const KinematicChain& chain);
// Reads low-dimensional logs only. Uses <root>/robot.json when present,
// otherwise franka_like_chain().
DatasetStats dataset_stats(const DatasetIndex& index);

// Writes episode_lengths.tsv, gripper_angles.tsv, ee_displacements.tsv and
// initial_positions.tsv into `dir`.
void write_stats(const DatasetStats& stats, const std::string& dir);

}  // namespace splatsim
