#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "splatsim/core/mesh.hpp"
#include "splatsim/core/pose.hpp"

namespace splatsim {

// Bounding-volume hierarchy over the triangles of a mesh, built once and
// read-only afterwards. Triangles are copied in (optionally posed), so the
// source mesh may be discarded.
class Bvh {
 public:
  using Triangle = std::array<Eigen::Vector3d, 3>;

  struct Node {
    Aabb box;
    // Leaf when count > 0: triangles leaf_triangles()[first, first + count).
    // Inner: children `left` and `right`.
    std::uint32_t first = 0;
    std::uint32_t count = 0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;

    bool is_leaf() const { return count > 0; }
  };

  struct ClosestPoint {
    double distance = 0.0;
    Eigen::Vector3d point = Eigen::Vector3d::Zero();
    std::uint32_t triangle = 0;
  };

  // Throws invalid_argument for a mesh without faces.
  explicit Bvh(const TriangleMesh& mesh, const Pose& pose = Pose::identity());

  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  // Triangle indices in leaf order.
  const std::vector<std::uint32_t>& leaf_triangles() const { return tri_index_; }
  const Aabb& bounds() const { return nodes_.front().box; }
  std::size_t size() const { return triangles_.size(); }

  ClosestPoint closest_point(const Eigen::Vector3d& p) const;
  // True iff some triangle lies within `radius` of segment ab.
  bool capsule_intersects(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double radius) const;
  // True iff some triangle lies within `radius` of triangle (t0, t1, t2).
  bool triangle_within(const Eigen::Vector3d& t0, const Eigen::Vector3d& t1, const Eigen::Vector3d& t2,
                       double radius) const;

 private:
  std::uint32_t build(std::uint32_t begin, std::uint32_t end);

  std::vector<Triangle> triangles_;
  std::vector<Aabb> tri_boxes_;
  std::vector<Eigen::Vector3d> centroids_;
  std::vector<std::uint32_t> tri_index_;
  std::vector<Node> nodes_;
};

Bvh build_bvh(const TriangleMesh& mesh);

inline Bvh::ClosestPoint distance_point_mesh(const Bvh& bvh, const Eigen::Vector3d& p) {
  return bvh.closest_point(p);
}

inline bool capsule_intersects_mesh(const Bvh& bvh, const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                    double radius) {
  return bvh.capsule_intersects(a, b, radius);
}

}  // namespace splatsim
