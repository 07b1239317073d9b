#include "splatsim/align/scene_alignment.hpp"

#include "splatsim/align/kabsch.hpp"
#include "splatsim/core/rng.hpp"
#include "splatsim/geometry/sampling.hpp"

namespace splatsim {

SceneAlignment align_scene(Scene& scene, const DepthImage& observed_depth, const CameraView& cam,
                           const CorrespondenceSet& marker, const SceneAlignmentOptions& options) {
  if (scene.background_mesh.empty()) throw invalid_argument("align_scene: scene has no background mesh");
  SceneAlignment out;
  out.coarse = estimate_pose_kabsch(marker);
  out.pose = out.coarse;
  if (options.use_icp) {
    if (options.depth_stride < 1) throw invalid_argument("align_scene: depth_stride must be >= 1");
    const PointCloud observed = depth_to_pointcloud(observed_depth, cam, options.depth_stride);
    Rng rng(options.seed);
    const PointCloud model = sample_points_on_mesh(scene.background_mesh, options.mesh_samples, rng);
    // Registers world-frame observations into the background frame.
    out.icp = icp_point_to_plane(observed, model, out.coarse.inverse(), options.icp);
    out.pose = out.icp.pose.inverse();
  }
  scene.background.local_to_world = out.pose;
  return out;
}

}  // namespace splatsim
