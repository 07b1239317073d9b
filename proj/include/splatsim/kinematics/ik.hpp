#pragma once

#include <cstdint>

#include "splatsim/core/error.hpp"
#include "splatsim/kinematics/chain.hpp"

namespace splatsim {

struct IkParams {
  double damping = 0.1;  // lambda
  double max_step = 0.2;  // rad, per joint per iteration
  int max_iterations = 200;
  double position_tolerance = 1e-4;  // m
  double rotation_tolerance = 1e-3;  // rad
  // Extra attempts from random in-limit seeds after the q_init attempt fails.
  int restarts = 10;
  std::uint64_t seed = 0;
};

struct IkResult {
  Eigen::VectorXd q;
  // Iterations of the successful attempt.
  int iterations = 0;
  double position_error = 0.0;
  double rotation_error = 0.0;
};

// Non-convergence; carries the best configuration found and its residual.
class IkError : public Error {
 public:
  IkError(const std::string& message, IkResult best)
      : Error(ErrorCategory::convergence, message), best_(std::move(best)) {}
  const IkResult& best() const { return best_; }

 private:
  IkResult best_;
};

// Gripper pose `target` in the base frame. Iterates
// dq = J^T (J J^T + lambda^2 I)^-1 e, scaled so no joint moves more than
// max_step, clamping to the joint limits after every step.
IkResult ik_damped_least_squares(const KinematicChain& chain, const Pose& target, const Eigen::VectorXd& q_init,
                                 const IkParams& params = {});

}  // namespace splatsim
