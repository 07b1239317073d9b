#include "splatsim/geometry/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "splatsim/core/error.hpp"
#include "splatsim/geometry/primitives.hpp"

namespace splatsim {

namespace {

constexpr std::uint32_t kLeafSize = 4;
// Box pruning slack so rounding in the box tests never rejects a triangle
// that the exact primitive test would accept.
constexpr double kPruneSlack = 1e-9;

Aabb inflated(const Aabb& box, double r) {
  Aabb out = box;
  out.min.array() -= r;
  out.max.array() += r;
  return out;
}

}  // namespace

Bvh::Bvh(const TriangleMesh& mesh, const Pose& pose) {
  if (mesh.faces.empty()) throw invalid_argument("cannot build a BVH over a mesh without faces");
  mesh.validate();
  const std::size_t n = mesh.faces.size();
  triangles_.reserve(n);
  tri_boxes_.reserve(n);
  centroids_.reserve(n);
  for (const Face& f : mesh.faces) {
    Triangle t{pose.apply(mesh.vertices[f[0]]), pose.apply(mesh.vertices[f[1]]), pose.apply(mesh.vertices[f[2]])};
    Aabb box;
    for (const auto& v : t) box.extend(v);
    centroids_.push_back((t[0] + t[1] + t[2]) / 3.0);
    tri_boxes_.push_back(box);
    triangles_.push_back(t);
  }
  tri_index_.resize(n);
  std::iota(tri_index_.begin(), tri_index_.end(), 0u);
  nodes_.reserve(2 * n);
  build(0, static_cast<std::uint32_t>(n));
}

std::uint32_t Bvh::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  Aabb box, centroid_box;
  for (std::uint32_t i = begin; i < end; ++i) {
    box.extend(tri_boxes_[tri_index_[i]]);
    centroid_box.extend(centroids_[tri_index_[i]]);
  }
  nodes_[id].box = box;
  if (end - begin <= kLeafSize) {
    nodes_[id].first = begin;
    nodes_[id].count = end - begin;
    return id;
  }
  int axis = 0;
  centroid_box.extents().maxCoeff(&axis);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(tri_index_.begin() + begin, tri_index_.begin() + mid, tri_index_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double ca = centroids_[a][axis], cb = centroids_[b][axis];
                     return ca < cb || (ca == cb && a < b);
                   });
  const std::uint32_t left = build(begin, mid);
  const std::uint32_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

Bvh::ClosestPoint Bvh::closest_point(const Eigen::Vector3d& p) const {
  ClosestPoint best;
  double best_d2 = std::numeric_limits<double>::infinity();
  std::uint32_t best_tri = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (node.box.squared_distance(p) > best_d2) continue;
    if (node.is_leaf()) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const std::uint32_t t = tri_index_[i];
        const Triangle& tri = triangles_[t];
        const Eigen::Vector3d q = closest_point_on_triangle(p, tri[0], tri[1], tri[2]);
        const double d2 = (q - p).squaredNorm();
        // Lowest triangle index wins ties, matching a linear scan.
        if (d2 < best_d2 || (d2 == best_d2 && t < best_tri)) {
          best_d2 = d2;
          best_tri = t;
          best.point = q;
        }
      }
      continue;
    }
    // Visit the nearer child first.
    const double dl = nodes_[node.left].box.squared_distance(p);
    const double dr = nodes_[node.right].box.squared_distance(p);
    if (dl <= dr) {
      stack.push_back(node.right);
      stack.push_back(node.left);
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  best.distance = std::sqrt(best_d2);
  best.triangle = best_tri;
  return best;
}

bool Bvh::capsule_intersects(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double radius) const {
  const double r2 = radius * radius;
  std::vector<std::uint32_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    const Aabb box = inflated(node.box, radius + kPruneSlack);
    if (!segment_intersects_box(a, b, box.min, box.max)) continue;
    if (node.is_leaf()) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const Triangle& tri = triangles_[tri_index_[i]];
        if (segment_triangle_squared_distance(a, b, tri[0], tri[1], tri[2]) <= r2) return true;
      }
      continue;
    }
    stack.push_back(node.right);
    stack.push_back(node.left);
  }
  return false;
}

bool Bvh::triangle_within(const Eigen::Vector3d& t0, const Eigen::Vector3d& t1, const Eigen::Vector3d& t2,
                          double radius) const {
  const double r2 = radius * radius;
  Aabb query;
  query.extend(t0);
  query.extend(t1);
  query.extend(t2);
  query = inflated(query, radius + kPruneSlack);
  std::vector<std::uint32_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (!node.box.overlaps(query)) continue;
    if (node.is_leaf()) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const std::uint32_t t = tri_index_[i];
        if (!tri_boxes_[t].overlaps(query)) continue;
        const Triangle& tri = triangles_[t];
        if (triangle_triangle_squared_distance(t0, t1, t2, tri[0], tri[1], tri[2]) <= r2) return true;
      }
      continue;
    }
    stack.push_back(node.right);
    stack.push_back(node.left);
  }
  return false;
}

Bvh build_bvh(const TriangleMesh& mesh) { return Bvh(mesh); }

}  // namespace splatsim
