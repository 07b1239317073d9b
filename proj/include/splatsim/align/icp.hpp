#pragma once

#include <vector>

#include "splatsim/core/error.hpp"
#include "splatsim/core/pose.hpp"
#include "splatsim/geometry/point_cloud.hpp"

namespace splatsim {

struct IcpParams {
  int max_iterations = 50;
  double max_correspondence_distance = 0.05;  // m
  double translation_tolerance = 1e-5;        // m
  double rotation_tolerance = 1e-4;           // rad
  // Fraction of the largest residuals discarded each iteration, in [0, 0.5].
  double trim_fraction = 0.1;

  void validate() const;
};

struct AlignmentResult {
  Pose pose;
  // RMS point-to-plane residual over the kept correspondences at `pose`.
  double residual = 0.0;
  // Accepted update steps.
  int iterations = 0;
  std::size_t inliers = 0;
  bool converged = false;
  // Trimmed residual at the initial pose and after each accepted step.
  std::vector<double> residual_history;
};

// Thrown when no source point has a target neighbor within the maximum
// distance; carries the pose the failing evaluation started from.
class IcpError : public Error {
 public:
  IcpError(const std::string& message, const Pose& init)
      : Error(ErrorCategory::convergence, message), init_(init) {}
  const Pose& init() const { return init_; }

 private:
  Pose init_;
};

// Point-to-plane ICP: finds T with T * source close to the target surface.
// Each iteration linearizes the rotation, solves the 6x6 normal equations
// over the trimmed nearest-neighbor pairs and is accepted only if the
// trimmed residual does not increase (halving the step up to four times);
// a step rejected at every length ends the run.
AlignmentResult icp_point_to_plane(const PointCloud& source, const PointCloud& target, const Pose& init,
                                   const IcpParams& params = {});

}  // namespace splatsim
