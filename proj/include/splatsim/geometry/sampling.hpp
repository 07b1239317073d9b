#pragma once

#include "splatsim/core/mesh.hpp"
#include "splatsim/core/rng.hpp"
#include "splatsim/geometry/point_cloud.hpp"

namespace splatsim {

// Area-weighted uniform samples over the surface. Each point carries the
// unit normal of the face it was drawn from.
PointCloud sample_points_on_mesh(const TriangleMesh& mesh, std::size_t n, Rng& rng);

}  // namespace splatsim
