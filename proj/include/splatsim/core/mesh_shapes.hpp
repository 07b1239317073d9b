#pragma once

#include "splatsim/core/mesh.hpp"

namespace splatsim {

// Closed, outward-oriented primitive meshes centered at the origin unless
// stated otherwise.

TriangleMesh make_box(const Eigen::Vector3d& extents);
// Each face split into a `divisions` x `divisions` grid of quads; vertices
// on shared edges are welded, so the result is watertight.
TriangleMesh make_subdivided_box(const Eigen::Vector3d& extents, int divisions);
// Axis along z.
TriangleMesh make_cylinder(double radius, double height, int segments, bool capped = true);
TriangleMesh make_uv_sphere(double radius, int rings, int segments);
// Subdivided icosahedron: near-uniform vertex spacing.
TriangleMesh make_icosphere(double radius, int subdivisions);
// Axis from a to b.
TriangleMesh make_capsule(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double radius,
                          int segments = 12, int cap_rings = 4);
// Planar grid in z = 0 spanning [0, size_x] x [0, size_y], all diagonals
// running the same way; normals along +z.
TriangleMesh make_grid(int cells_x, int cells_y, double size_x, double size_y);

// Concatenates meshes. Colors are kept only when every input has them.
TriangleMesh merge_meshes(const std::vector<TriangleMesh>& parts);

// Assigns one color to every vertex.
void paint(TriangleMesh& mesh, const Eigen::Vector3d& color);

}  // namespace splatsim
