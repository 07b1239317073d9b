#include "splatsim/geometry/normals.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "splatsim/core/error.hpp"
#include "splatsim/geometry/kdtree.hpp"

namespace splatsim {

PointCloud estimate_normals(const PointCloud& cloud, std::size_t k, const Eigen::Vector3d& viewpoint) {
  if (k < 3) throw invalid_argument(fmt::format("normal estimation needs k >= 3 (got {})", k));
  if (cloud.size() < k) {
    throw invalid_argument(fmt::format("normal estimation needs at least k={} points (got {})", k, cloud.size()));
  }
  const KdTree tree(cloud.points);
  PointCloud out;
  out.points = cloud.points;
  out.normals.resize(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto neighbors = tree.knn(cloud.points[i], k);
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& nb : neighbors) mean += cloud.points[nb.index];
    mean /= static_cast<double>(neighbors.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& nb : neighbors) {
      const Eigen::Vector3d d = cloud.points[nb.index] - mean;
      cov += d * d.transpose();
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    // Eigenvalues ascend; column 0 spans the direction of least spread.
    Eigen::Vector3d n = eig.eigenvectors().col(0).normalized();
    if (n.dot(viewpoint - cloud.points[i]) < 0.0) n = -n;
    out.normals[i] = n;
  }
  return out;
}

}  // namespace splatsim
