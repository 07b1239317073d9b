#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Core>

namespace splatsim {

// Static 3-d tree over a point set. Ties between equidistant points are
// broken by the lower index, so results are deterministic.
class KdTree {
 public:
  struct Neighbor {
    std::uint32_t index = 0;
    double squared_distance = std::numeric_limits<double>::infinity();
  };

  KdTree() = default;
  explicit KdTree(std::vector<Eigen::Vector3d> points);

  std::size_t size() const { return points_.size(); }
  const std::vector<Eigen::Vector3d>& points() const { return points_; }

  // Nearest point with squared distance <= max_squared_distance; index
  // equals size() when none qualifies.
  Neighbor nearest(const Eigen::Vector3d& query,
                   double max_squared_distance = std::numeric_limits<double>::infinity()) const;

  // The k nearest points sorted by increasing distance (fewer if the tree
  // holds fewer points).
  std::vector<Neighbor> knn(const Eigen::Vector3d& query, std::size_t k) const;

 private:
  struct Node {
    // Leaf: [begin, end) into order_. Inner: split axis/value, children.
    std::uint32_t begin = 0, end = 0;
    std::int32_t left = -1, right = -1;
    int axis = 0;
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end, int depth);
  void nearest_rec(std::int32_t node, const Eigen::Vector3d& q, Neighbor& best) const;
  void knn_rec(std::int32_t node, const Eigen::Vector3d& q, std::size_t k, std::vector<Neighbor>& heap) const;

  std::vector<Eigen::Vector3d> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace splatsim
