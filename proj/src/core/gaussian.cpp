#include "splatsim/core/gaussian.hpp"

#include <cmath>

#include <fmt/format.h>

#include "splatsim/core/error.hpp"

namespace splatsim {

Eigen::Matrix3d GaussianPrimitive::covariance() const {
  const Eigen::Matrix3d m = rotation.normalized().toRotationMatrix() * scale.asDiagonal();
  const Eigen::Matrix3d sigma = m * m.transpose();
  return 0.5 * (sigma + sigma.transpose());
}

GaussianPrimitive GaussianPrimitive::transformed(const Pose& pose) const {
  GaussianPrimitive out = *this;
  out.mean = pose.apply(mean);
  out.rotation = (pose.rotation * rotation).normalized();
  return out;
}

void GaussianPrimitive::validate() const {
  if (!mean.allFinite() || !scale.allFinite() || !color.allFinite() || !std::isfinite(opacity) ||
      !rotation.coeffs().allFinite()) {
    throw invalid_argument("gaussian has non-finite attributes");
  }
  if ((scale.array() <= 0.0).any()) {
    throw invalid_argument(fmt::format("gaussian scales must be positive (got {}, {}, {})", scale.x(),
                                       scale.y(), scale.z()));
  }
  if (!(opacity > 0.0 && opacity < 1.0)) {
    throw invalid_argument(fmt::format("gaussian opacity must lie in (0,1) (got {})", opacity));
  }
  if (rotation.norm() < 1e-12) throw invalid_argument("gaussian rotation quaternion is zero");
}

void GaussianCloud::validate() const {
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    try {
      primitives[i].validate();
    } catch (const Error& e) {
      throw invalid_argument(fmt::format("primitive {}: {}", i, e.what()));
    }
  }
}

}  // namespace splatsim
