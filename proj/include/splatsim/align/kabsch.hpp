#pragma once

#include "splatsim/align/correspondence.hpp"
#include "splatsim/core/pose.hpp"

namespace splatsim {

// Least-squares rigid transform T minimizing sum |T s_i - t_i|^2, with a
// proper rotation. Throws invalid_argument when either point set is
// collinear or coincident.
Pose estimate_pose_kabsch(const CorrespondenceSet& corr);

}  // namespace splatsim
