#pragma once

#include <cstdint>

#include "splatsim/kinematics/path.hpp"

namespace splatsim {

struct PlannerParams {
  double step = 0.1;  // rad, max norm per extension
  int max_iterations = 10000;
  double resolution = kDefaultResolution;
  std::uint64_t seed = 0;
};

struct PlanResult {
  bool success = false;
  Path path;
  int iterations = 0;
};

// Bidirectional RRT with the Connect heuristic, sampling uniformly within
// [lower, upper]. The straight segment is tried first. Edges are checked at
// params.resolution. Throws Error(planning) if start or goal is invalid;
// an exhausted budget returns success = false.
PlanResult rrt_connect(const Eigen::VectorXd& start, const Eigen::VectorXd& goal, const Eigen::VectorXd& lower,
                       const Eigen::VectorXd& upper, const ValidityFn& valid, const PlannerParams& params = {});

}  // namespace splatsim
