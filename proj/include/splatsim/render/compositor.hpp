#pragma once

#include <string>
#include <vector>

#include "splatsim/core/image.hpp"
#include "splatsim/core/scene.hpp"
#include "splatsim/render/buffers.hpp"
#include "splatsim/render/mesh_rasterizer.hpp"

namespace splatsim {

// Hybrid z-buffer composite. Splats are accumulated front to back, skipping
// any splat whose depth exceeds the mesh depth at that pixel. If the
// accumulation did not stop early, the mesh color is then added with the
// remaining transmittance (the mesh is opaque), and finally the background.
// Output depth is min(mesh depth, splat expected depth).
RenderBuffers composite(const CameraView& cam, const GaussianCloud& cloud, const RenderBuffers& mesh,
                        const Eigen::Vector3d& background_color = Eigen::Vector3d::Zero());

struct RenderedView {
  Image8 color;
  DepthImage depth;
};

// Background splats plus every posed object mesh plus `extra` meshes (e.g.
// robot links), seen from `cam`.
RenderBuffers render_view(const CameraView& cam, const Scene& scene, const std::vector<MeshInstance>& extra = {});

// Throws not_found for an unknown camera name.
RenderedView render_scene(const Scene& scene, const std::string& camera);

}  // namespace splatsim
