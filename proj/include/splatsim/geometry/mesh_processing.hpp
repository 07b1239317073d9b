#pragma once

#include <cstddef>

#include "splatsim/core/mesh.hpp"

namespace splatsim {

struct HoleFillStats {
  std::size_t loops_found = 0;
  std::size_t loops_filled = 0;
  // Loops longer than the limit, or whose tracing hit a non-manifold vertex.
  std::size_t loops_skipped = 0;
};

inline constexpr std::size_t kDefaultMaxLoopLength = 64;

// Closes boundary loops of at most `max_loop_len` edges. Triangles close
// directly; longer loops get a fan around a new centroid vertex. New faces
// are oriented consistently with the surrounding surface.
TriangleMesh fill_holes(const TriangleMesh& mesh, std::size_t max_loop_len = kDefaultMaxLoopLength,
                        HoleFillStats* stats = nullptr);

inline constexpr int kDefaultSmoothIterations = 10;
inline constexpr double kDefaultSmoothLambda = 0.5;

// Uniform (umbrella) Laplacian smoothing; boundary vertices stay fixed.
// Requires 0 < lambda <= 1.
TriangleMesh smooth_mesh(const TriangleMesh& mesh, int iterations = kDefaultSmoothIterations,
                         double lambda = kDefaultSmoothLambda);

struct SimplifyStats {
  std::size_t collapses = 0;
  // Edges shared by more than two faces; their endpoints are never moved.
  std::size_t non_manifold_edges = 0;
  double max_collapse_error = 0.0;
};

// Quadric-error edge collapse until at most `target_faces` remain or no
// legal collapse is left. Boundary edges carry penalty quadrics. Vertices
// never leave the input AABB and every face of that AABB keeps a vertex, so
// the bounds are preserved. Requires target_faces >= 2.
TriangleMesh simplify_mesh(const TriangleMesh& mesh, std::size_t target_faces, SimplifyStats* stats = nullptr);

}  // namespace splatsim
