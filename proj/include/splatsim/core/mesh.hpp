#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "splatsim/core/pose.hpp"

namespace splatsim {

struct Aabb {
  Eigen::Vector3d min = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector3d max = Eigen::Vector3d::Constant(-std::numeric_limits<double>::infinity());

  bool empty() const { return (min.array() > max.array()).any(); }
  void extend(const Eigen::Vector3d& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  void extend(const Aabb& other) {
    min = min.cwiseMin(other.min);
    max = max.cwiseMax(other.max);
  }
  Eigen::Vector3d center() const { return 0.5 * (min + max); }
  Eigen::Vector3d extents() const { return max - min; }
  double diagonal() const { return empty() ? 0.0 : (max - min).norm(); }
  bool contains(const Aabb& other) const {
    return (other.min.array() >= min.array()).all() && (other.max.array() <= max.array()).all();
  }
  bool overlaps(const Aabb& other) const {
    return (min.array() <= other.max.array()).all() && (other.min.array() <= max.array()).all();
  }
  // Squared distance from p to the box (0 inside).
  double squared_distance(const Eigen::Vector3d& p) const {
    const Eigen::Vector3d d = (min - p).cwiseMax(p - max).cwiseMax(0.0);
    return d.squaredNorm();
  }
};

using Face = std::array<std::uint32_t, 3>;

struct TriangleMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<Face> faces;
  // Optional per-vertex attributes; empty when absent.
  std::vector<Eigen::Vector3d> colors;
  std::vector<Eigen::Vector3d> normals;

  bool has_colors() const { return !colors.empty(); }
  bool has_normals() const { return !normals.empty(); }
  bool empty() const { return faces.empty(); }

  // Indices in range and attribute arrays sized like `vertices`.
  void validate() const;

  Aabb bounds() const;
  double face_area(std::size_t f) const;
  // Unnormalized: length equals twice the face area.
  Eigen::Vector3d face_cross(std::size_t f) const;
  Eigen::Vector3d face_normal(std::size_t f) const;
  double surface_area() const;

  TriangleMesh transformed(const Pose& pose) const;
};

// Drops faces with repeated indices or area below `min_area`; returns the
// number removed.
std::size_t remove_degenerate_faces(TriangleMesh& mesh, double min_area = 1e-14);

// Removes vertices not referenced by any face, remapping indices.
void remove_unreferenced_vertices(TriangleMesh& mesh);

// Undirected edges used by exactly one face.
std::size_t count_boundary_edges(const TriangleMesh& mesh);
std::size_t count_edges(const TriangleMesh& mesh);
// V - E + F over referenced vertices.
long euler_characteristic(const TriangleMesh& mesh);
// Every undirected edge shared by exactly two faces.
bool is_watertight(const TriangleMesh& mesh);

}  // namespace splatsim
