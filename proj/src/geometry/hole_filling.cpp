#include "splatsim/geometry/mesh_processing.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

namespace splatsim {

namespace {

using Edge = std::pair<std::uint32_t, std::uint32_t>;

}  // namespace

TriangleMesh fill_holes(const TriangleMesh& mesh, std::size_t max_loop_len, HoleFillStats* stats) {
  mesh.validate();
  HoleFillStats local;
  std::map<Edge, int> directed;
  for (const Face& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) ++directed[{f[k], f[(k + 1) % 3]}];
  }
  // Boundary half-edges u->v: present once, with no twin v->u.
  std::map<std::uint32_t, std::set<std::uint32_t>> outgoing;
  for (const auto& [e, count] : directed) {
    if (count == 1 && !directed.count({e.second, e.first})) outgoing[e.first].insert(e.second);
  }

  TriangleMesh out = mesh;
  while (!outgoing.empty()) {
    const std::uint32_t start = outgoing.begin()->first;
    std::vector<std::uint32_t> loop{start};
    std::uint32_t cur = start;
    bool closed = false;
    while (true) {
      auto it = outgoing.find(cur);
      if (it == outgoing.end()) break;
      const std::uint32_t next = *it->second.begin();
      it->second.erase(it->second.begin());
      if (it->second.empty()) outgoing.erase(it);
      if (next == start) {
        closed = true;
        break;
      }
      loop.push_back(next);
      cur = next;
    }
    ++local.loops_found;
    // A vertex repeated inside the loop means the boundary pinches there.
    std::vector<std::uint32_t> sorted = loop;
    std::sort(sorted.begin(), sorted.end());
    const bool simple = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
    if (!closed || !simple || loop.size() < 3 || loop.size() > max_loop_len) {
      ++local.loops_skipped;
      continue;
    }
    const std::size_t n = loop.size();
    if (n == 3) {
      out.faces.push_back({loop[1], loop[0], loop[2]});
    } else {
      Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
      Eigen::Vector3d color = Eigen::Vector3d::Zero();
      Eigen::Vector3d normal = Eigen::Vector3d::Zero();
      for (std::uint32_t v : loop) {
        centroid += mesh.vertices[v];
        if (mesh.has_colors()) color += mesh.colors[v];
        if (mesh.has_normals()) normal += mesh.normals[v];
      }
      const auto c = static_cast<std::uint32_t>(out.vertices.size());
      out.vertices.push_back(centroid / static_cast<double>(n));
      if (mesh.has_colors()) out.colors.push_back(color / static_cast<double>(n));
      if (mesh.has_normals()) out.normals.push_back(normal.norm() > 0.0 ? normal.normalized() : normal);
      for (std::size_t i = 0; i < n; ++i) out.faces.push_back({loop[(i + 1) % n], loop[i], c});
    }
    ++local.loops_filled;
  }
  if (stats) *stats = local;
  return out;
}

}  // namespace splatsim
