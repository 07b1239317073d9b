#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "splatsim/core/image.hpp"
#include "splatsim/core/pose.hpp"

namespace splatsim {

// One control step: the observation o_t (proprioception plus privileged
// object poses; images live in EpisodeRecord::frames) and the action a_t
// issued from it.
struct EpisodeStep {
  double t = 0.0;
  Eigen::VectorXd joints;
  // Finger opening in meters.
  double gripper = 0.0;
  Eigen::VectorXd action_joints;
  // 1 = open, 0 = closed.
  double action_gripper = 1.0;
  // World poses, index-aligned with EpisodeRecord::object_ids.
  std::vector<Pose> object_poses;
};

struct EpisodeRecord {
  std::string task;
  std::uint64_t seed = 0;
  bool success = false;
  double dt = 0.05;
  Pose robot_base;
  std::vector<std::string> object_ids;
  // Randomized scalars (object placements, base offset), by name.
  std::map<std::string, double> randomization;
  std::vector<EpisodeStep> steps;
  // Camera name -> one image per step. May be empty for low-dim records.
  std::map<std::string, std::vector<Image8>> frames;

  std::size_t step_count() const { return steps.size(); }
  int dof() const { return steps.empty() ? 0 : static_cast<int>(steps.front().joints.size()); }

  // Consistent step dimensions, contiguous timestamps t_k = k * dt, finite
  // values, one frame per step for every camera.
  void validate() const;
};

}  // namespace splatsim
