#include "splatsim/align/kabsch.hpp"

#include <Eigen/SVD>

#include "splatsim/core/error.hpp"

namespace splatsim {
namespace {

// Relative size of the second principal spread below which a point set is
// treated as collinear.
constexpr double kCollinearRatio = 1e-9;

Eigen::Vector3d centroid(const std::vector<Eigen::Vector3d>& pts) {
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& p : pts) c += p;
  return c / static_cast<double>(pts.size());
}

void require_spread(const std::vector<Eigen::Vector3d>& pts, const Eigen::Vector3d& c, const char* which) {
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) cov += (p - c) * (p - c).transpose();
  const Eigen::Vector3d sv = Eigen::JacobiSVD<Eigen::Matrix3d>(cov).singularValues();
  if (!(sv[0] > 0.0) || sv[1] <= kCollinearRatio * sv[0]) {
    throw invalid_argument(std::string("kabsch: ") + which + " points are collinear or coincident");
  }
}

}  // namespace

Pose estimate_pose_kabsch(const CorrespondenceSet& corr) {
  corr.validate();
  const Eigen::Vector3d cs = centroid(corr.source);
  const Eigen::Vector3d ct = centroid(corr.target);
  require_spread(corr.source, cs, "source");
  require_spread(corr.target, ct, "target");

  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < corr.size(); ++i) h += (corr.source[i] - cs) * (corr.target[i] - ct).transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0 ? -1.0 : 1.0;
  const Eigen::Matrix3d r = svd.matrixV() * d * svd.matrixU().transpose();
  return Pose::from_rotation_matrix(r, ct - r * cs);
}

}  // namespace splatsim
