#include "splatsim/geometry/mesh_processing.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "splatsim/core/error.hpp"

namespace splatsim {

TriangleMesh smooth_mesh(const TriangleMesh& mesh, int iterations, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw invalid_argument(fmt::format("lambda must be in (0, 1] (got {})", lambda));
  if (iterations < 0) throw invalid_argument("iterations must be non-negative");
  mesh.validate();
  const std::size_t nv = mesh.vertices.size();

  std::vector<std::vector<std::uint32_t>> neighbors(nv);
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> edge_use;
  for (const Face& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      const std::uint32_t a = f[k], b = f[(k + 1) % 3];
      neighbors[a].push_back(b);
      neighbors[b].push_back(a);
      ++edge_use[{std::min(a, b), std::max(a, b)}];
    }
  }
  std::vector<bool> fixed(nv, false);
  for (const auto& [e, count] : edge_use) {
    if (count == 1) fixed[e.first] = fixed[e.second] = true;
  }
  for (auto& list : neighbors) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }

  TriangleMesh out = mesh;
  std::vector<Eigen::Vector3d> next(nv);
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < nv; ++i) {
      if (fixed[i] || neighbors[i].empty()) {
        next[i] = out.vertices[i];
        continue;
      }
      Eigen::Vector3d avg = Eigen::Vector3d::Zero();
      for (std::uint32_t j : neighbors[i]) avg += out.vertices[j];
      avg /= static_cast<double>(neighbors[i].size());
      next[i] = out.vertices[i] + lambda * (avg - out.vertices[i]);
    }
    out.vertices.swap(next);
  }
  // Stale after moving vertices.
  out.normals.clear();
  return out;
}

}  // namespace splatsim
