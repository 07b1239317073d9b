#pragma once

#include <vector>

#include <Eigen/Core>

#include "splatsim/core/camera.hpp"
#include "splatsim/core/mesh.hpp"
#include "splatsim/core/pose.hpp"
#include "splatsim/render/buffers.hpp"

namespace splatsim {

// Fixed world-frame directional light; shading is
// color * (kAmbient + kDiffuse * |n . l|) with the flat face normal n.
inline const Eigen::Vector3d kLightDirection = Eigen::Vector3d(0.3, -0.2, 1.0).normalized();
inline constexpr double kAmbient = 0.4;
inline constexpr double kDiffuse = 0.6;
// Used for meshes without vertex colors.
inline const Eigen::Vector3d kDefaultMeshColor = Eigen::Vector3d::Constant(0.7);

struct MeshInstance {
  const TriangleMesh* mesh = nullptr;
  Pose local_to_world;
};

// Color the rasterizer assigns to a fragment of face f of an instance.
Eigen::Vector3d shade(const Eigen::Vector3d& albedo, const Eigen::Vector3d& world_normal);

// Rasterizes every triangle (both sides) with near-plane clipping. A pixel
// is covered when its center lies inside or on the projected triangle;
// depth and vertex colors are interpolated perspective-correctly and the
// nearest fragment wins (earlier draw order on exact ties). Covered pixels
// get alpha 1; uncovered ones keep depth +inf and alpha 0.
RenderBuffers rasterize_mesh(const CameraView& cam, const std::vector<MeshInstance>& instances);

}  // namespace splatsim
