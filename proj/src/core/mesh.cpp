#include "splatsim/core/mesh.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include <fmt/format.h>

#include "splatsim/core/error.hpp"

namespace splatsim {

namespace {

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

std::unordered_map<std::uint64_t, int> edge_use_counts(const TriangleMesh& mesh) {
  std::unordered_map<std::uint64_t, int> counts;
  counts.reserve(mesh.faces.size() * 2);
  for (const Face& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) ++counts[edge_key(f[k], f[(k + 1) % 3])];
  }
  return counts;
}

}  // namespace

void TriangleMesh::validate() const {
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < faces.size(); ++i) {
    for (std::uint32_t idx : faces[i]) {
      if (idx >= n) {
        throw invalid_argument(fmt::format("face {} references vertex {} but mesh has {} vertices", i, idx, n));
      }
    }
  }
  if (!colors.empty() && colors.size() != n) {
    throw invalid_argument(fmt::format("mesh has {} colors for {} vertices", colors.size(), n));
  }
  if (!normals.empty() && normals.size() != n) {
    throw invalid_argument(fmt::format("mesh has {} normals for {} vertices", normals.size(), n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!vertices[i].allFinite()) throw invalid_argument(fmt::format("vertex {} is not finite", i));
  }
}

Aabb TriangleMesh::bounds() const {
  Aabb box;
  for (const auto& v : vertices) box.extend(v);
  return box;
}

Eigen::Vector3d TriangleMesh::face_cross(std::size_t f) const {
  const auto& [a, b, c] = faces[f];
  return (vertices[b] - vertices[a]).cross(vertices[c] - vertices[a]);
}

double TriangleMesh::face_area(std::size_t f) const { return 0.5 * face_cross(f).norm(); }

Eigen::Vector3d TriangleMesh::face_normal(std::size_t f) const {
  const Eigen::Vector3d n = face_cross(f);
  const double len = n.norm();
  return len > 0.0 ? Eigen::Vector3d(n / len) : Eigen::Vector3d::Zero();
}

double TriangleMesh::surface_area() const {
  double total = 0.0;
  for (std::size_t f = 0; f < faces.size(); ++f) total += face_area(f);
  return total;
}

TriangleMesh TriangleMesh::transformed(const Pose& pose) const {
  TriangleMesh out = *this;
  for (auto& v : out.vertices) v = pose.apply(v);
  for (auto& n : out.normals) n = pose.rotate(n);
  return out;
}

std::size_t remove_degenerate_faces(TriangleMesh& mesh, double min_area) {
  const std::size_t before = mesh.faces.size();
  std::vector<Face> kept;
  kept.reserve(before);
  for (std::size_t f = 0; f < before; ++f) {
    const Face& face = mesh.faces[f];
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) continue;
    if (!(mesh.face_area(f) > min_area)) continue;
    kept.push_back(face);
  }
  mesh.faces = std::move(kept);
  return before - mesh.faces.size();
}

void remove_unreferenced_vertices(TriangleMesh& mesh) {
  constexpr std::uint32_t unused = 0xffffffffu;
  std::vector<std::uint32_t> remap(mesh.vertices.size(), unused);
  std::uint32_t next = 0;
  for (Face& f : mesh.faces) {
    for (auto& idx : f) {
      if (remap[idx] == unused) remap[idx] = next++;
      idx = remap[idx];
    }
  }
  auto compact = [&](std::vector<Eigen::Vector3d>& values) {
    if (values.empty()) return;
    std::vector<Eigen::Vector3d> out(next);
    for (std::size_t i = 0; i < remap.size(); ++i) {
      if (remap[i] != unused) out[remap[i]] = values[i];
    }
    values = std::move(out);
  };
  compact(mesh.vertices);
  compact(mesh.colors);
  compact(mesh.normals);
}

std::size_t count_boundary_edges(const TriangleMesh& mesh) {
  std::size_t n = 0;
  for (const auto& [key, count] : edge_use_counts(mesh)) {
    if (count == 1) ++n;
  }
  return n;
}

std::size_t count_edges(const TriangleMesh& mesh) { return edge_use_counts(mesh).size(); }

long euler_characteristic(const TriangleMesh& mesh) {
  std::vector<char> used(mesh.vertices.size(), 0);
  long v = 0;
  for (const Face& f : mesh.faces) {
    for (auto idx : f) {
      if (!used[idx]) {
        used[idx] = 1;
        ++v;
      }
    }
  }
  return v - static_cast<long>(count_edges(mesh)) + static_cast<long>(mesh.faces.size());
}

bool is_watertight(const TriangleMesh& mesh) {
  if (mesh.faces.empty()) return false;
  for (const auto& [key, count] : edge_use_counts(mesh)) {
    if (count != 2) return false;
  }
  return true;
}

}  // namespace splatsim
