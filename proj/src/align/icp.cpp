#include "splatsim/align/icp.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>
#include <fmt/format.h>

#include "splatsim/geometry/kdtree.hpp"

namespace splatsim {

void IcpParams::validate() const {
  if (max_iterations <= 0) throw invalid_argument("icp: max_iterations must be positive");
  if (!(max_correspondence_distance > 0)) throw invalid_argument("icp: max_correspondence_distance must be positive");
  if (!(translation_tolerance > 0) || !(rotation_tolerance > 0)) {
    throw invalid_argument("icp: convergence thresholds must be positive");
  }
  if (!(trim_fraction >= 0.0 && trim_fraction <= 0.5)) throw invalid_argument("icp: trim_fraction must be in [0, 0.5]");
}

namespace {

struct Pair {
  Eigen::Vector3d point;   // transformed source point
  Eigen::Vector3d normal;  // target normal
  double residual;         // signed point-to-plane distance
};

struct Evaluation {
  std::vector<Pair> kept;
  double rms = 0.0;
};

// Nearest-neighbor pairs at `pose`, trimmed by absolute residual. Ties in
// residual keep the lower source index.
Evaluation evaluate(const PointCloud& source, const PointCloud& target, const KdTree& tree, const Pose& pose,
                    const IcpParams& params) {
  const double max_sq = params.max_correspondence_distance * params.max_correspondence_distance;
  std::vector<std::pair<double, std::size_t>> order;
  std::vector<Pair> pairs;
  pairs.reserve(source.size());
  for (const auto& s : source.points) {
    const Eigen::Vector3d p = pose.apply(s);
    const auto nb = tree.nearest(p, max_sq);
    if (nb.index == tree.size()) continue;
    const Eigen::Vector3d& n = target.normals[nb.index];
    pairs.push_back({p, n, (p - target.points[nb.index]).dot(n)});
    order.emplace_back(std::abs(pairs.back().residual), pairs.size() - 1);
  }
  Evaluation ev;
  if (pairs.empty()) return ev;
  const auto keep = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil((1.0 - params.trim_fraction) * static_cast<double>(pairs.size()))));
  std::sort(order.begin(), order.end());
  ev.kept.reserve(keep);
  double sum = 0.0;
  for (std::size_t i = 0; i < keep; ++i) {
    ev.kept.push_back(pairs[order[i].second]);
    sum += ev.kept.back().residual * ev.kept.back().residual;
  }
  ev.rms = std::sqrt(sum / static_cast<double>(keep));
  return ev;
}

// Minimizes sum (r_i + (p_i x n_i).w + n_i.t)^2; rank-deficient directions
// (e.g. sliding along a plane) get the minimum-norm solution.
Eigen::Matrix<double, 6, 1> solve_step(const std::vector<Pair>& kept) {
  Eigen::Matrix<double, 6, 6> ata = Eigen::Matrix<double, 6, 6>::Zero();
  Eigen::Matrix<double, 6, 1> atb = Eigen::Matrix<double, 6, 1>::Zero();
  for (const auto& pr : kept) {
    Eigen::Matrix<double, 6, 1> a;
    a << pr.point.cross(pr.normal), pr.normal;
    ata += a * a.transpose();
    atb -= a * pr.residual;
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 6, 6>> svd(ata, Eigen::ComputeFullU | Eigen::ComputeFullV);
  svd.setThreshold(1e-10);
  return svd.solve(atb);
}

constexpr int kMaxHalvings = 4;

Pose step_pose(const Eigen::Matrix<double, 6, 1>& x) {
  const Eigen::Vector3d w = x.head<3>();
  const double angle = w.norm();
  return angle > 0 ? Pose::from_axis_angle(w / angle, angle, x.tail<3>()) : Pose::from_translation(x.tail<3>());
}

}  // namespace

AlignmentResult icp_point_to_plane(const PointCloud& source, const PointCloud& target, const Pose& init,
                                   const IcpParams& params) {
  params.validate();
  if (source.empty()) throw invalid_argument("icp: empty source cloud");
  if (target.empty()) throw invalid_argument("icp: empty target cloud");
  if (!target.has_normals()) throw invalid_argument("icp: target cloud has no normals");
  target.validate();

  const KdTree tree(target.points);
  AlignmentResult result;
  result.pose = init;
  Evaluation current = evaluate(source, target, tree, init, params);
  if (current.kept.empty()) {
    throw IcpError(fmt::format("icp: no correspondences within {} m at the initial pose",
                               params.max_correspondence_distance),
                   init);
  }
  result.residual_history.push_back(current.rms);

  for (int it = 0; it < params.max_iterations; ++it) {
    Eigen::Matrix<double, 6, 1> x = solve_step(current.kept);
    // Backtracks by halving when the full step raises the trimmed residual
    // (correspondences may change under the step).
    bool accepted = false;
    Pose candidate;
    Evaluation next;
    for (int halving = 0; halving <= kMaxHalvings && !accepted; ++halving, x *= 0.5) {
      candidate = step_pose(x) * result.pose;
      next = evaluate(source, target, tree, candidate, params);
      accepted = !next.kept.empty() && next.rms <= current.rms;
    }
    if (!accepted) break;
    x *= 2.0;
    const double angle = x.head<3>().norm();
    const Eigen::Vector3d t = x.tail<3>();
    result.pose = candidate;
    current = std::move(next);
    ++result.iterations;
    result.residual_history.push_back(current.rms);
    if (t.norm() < params.translation_tolerance && angle < params.rotation_tolerance) {
      result.converged = true;
      break;
    }
  }
  // A rejected step leaves the pose at a local minimum of the trimmed residual.
  if (!result.converged && result.iterations < params.max_iterations) result.converged = true;
  result.residual = current.rms;
  result.inliers = current.kept.size();
  return result;
}

}  // namespace splatsim
