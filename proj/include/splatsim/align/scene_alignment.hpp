#pragma once

#include <cstdint>

#include "splatsim/align/correspondence.hpp"
#include "splatsim/align/icp.hpp"
#include "splatsim/core/camera.hpp"
#include "splatsim/core/image.hpp"
#include "splatsim/core/scene.hpp"

namespace splatsim {

struct SceneAlignmentOptions {
  IcpParams icp;
  bool use_icp = true;
  // Points sampled on the background mesh as the ICP target.
  std::size_t mesh_samples = 20000;
  // Every stride-th depth pixel (in x and y) becomes a source point.
  int depth_stride = 4;
  std::uint64_t seed = 0;
};

struct SceneAlignment {
  // Background local-to-world from the marker correspondences alone.
  Pose coarse;
  // Final background local-to-world.
  Pose pose;
  // ICP run in the background frame; default-constructed when disabled.
  AlignmentResult icp;
};

// Marker correspondences map background-frame points (source) to world
// points (target). The observed depth, seen from `cam` in the world frame,
// is registered onto points sampled from the background mesh, starting from
// the marker estimate. Sets scene.background.local_to_world to the result.
SceneAlignment align_scene(Scene& scene, const DepthImage& observed_depth, const CameraView& cam,
                           const CorrespondenceSet& marker, const SceneAlignmentOptions& options = {});

}  // namespace splatsim
