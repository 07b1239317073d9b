#include "splatsim/kinematics/chain.hpp"

#include <cmath>

#include <fmt/format.h>

#include "splatsim/core/error.hpp"

namespace splatsim {

Eigen::VectorXd KinematicChain::lower_limits() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(joints.size()));
  for (std::size_t i = 0; i < joints.size(); ++i) v[static_cast<Eigen::Index>(i)] = joints[i].lower;
  return v;
}

Eigen::VectorXd KinematicChain::upper_limits() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(joints.size()));
  for (std::size_t i = 0; i < joints.size(); ++i) v[static_cast<Eigen::Index>(i)] = joints[i].upper;
  return v;
}

bool KinematicChain::within_limits(const Eigen::VectorXd& q, double tol) const {
  if (static_cast<std::size_t>(q.size()) != joints.size()) return false;
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const double v = q[static_cast<Eigen::Index>(i)];
    if (!(v >= joints[i].lower - tol && v <= joints[i].upper + tol)) return false;
  }
  return true;
}

Eigen::VectorXd KinematicChain::clamp(const Eigen::VectorXd& q) const {
  return q.cwiseMax(lower_limits()).cwiseMin(upper_limits());
}

void KinematicChain::validate() const {
  if (joints.empty()) throw invalid_argument("chain: no joints");
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const Joint& j = joints[i];
    if (!(j.lower < j.upper)) throw invalid_argument(fmt::format("chain: joint {} has lower >= upper", i));
    if (std::abs(j.axis.norm() - 1.0) > 1e-9) throw invalid_argument(fmt::format("chain: joint {} axis is not unit", i));
  }
  if (link_capsules.size() != joints.size() + 1) {
    throw invalid_argument(fmt::format("chain: {} capsule groups for {} links", link_capsules.size(), joints.size() + 1));
  }
  auto check = [](const Capsule& c, const std::string& where) {
    if (!(c.radius > 0)) throw invalid_argument("chain: capsule radius must be positive (" + where + ")");
  };
  for (std::size_t i = 0; i < link_capsules.size(); ++i) {
    for (const auto& c : link_capsules[i]) check(c, fmt::format("link {}", i));
  }
  for (const auto& c : hand_capsules) check(c, "hand");
  check(finger, "finger");
  if (!(gripper_max_opening > 0)) throw invalid_argument("chain: gripper max opening must be positive");
  if (!within_limits(home)) throw invalid_argument("chain: home configuration violates limits");
}

namespace {

void require_dof(const KinematicChain& chain, const Eigen::VectorXd& q) {
  if (static_cast<std::size_t>(q.size()) != chain.dof()) {
    throw invalid_argument(fmt::format("expected {} joint values, got {}", chain.dof(), q.size()));
  }
}

}  // namespace

FkResult forward_kinematics(const KinematicChain& chain, const Eigen::VectorXd& q, const Pose& base) {
  require_dof(chain, q);
  FkResult fk;
  fk.links.reserve(chain.dof() + 1);
  fk.links.push_back(base);
  for (std::size_t i = 0; i < chain.dof(); ++i) {
    const Joint& j = chain.joints[i];
    fk.links.push_back(fk.links.back() * j.origin * Pose::from_axis_angle(j.axis, q[static_cast<Eigen::Index>(i)]));
  }
  fk.gripper = fk.links.back() * chain.flange_to_gripper;
  return fk;
}

Eigen::MatrixXd jacobian(const KinematicChain& chain, const Eigen::VectorXd& q) {
  const FkResult fk = forward_kinematics(chain, q);
  Eigen::MatrixXd j(6, static_cast<Eigen::Index>(chain.dof()));
  const Eigen::Vector3d p = fk.gripper.translation;
  for (std::size_t i = 0; i < chain.dof(); ++i) {
    const Pose& f = fk.links[i + 1];
    const Eigen::Vector3d z = f.rotate(chain.joints[i].axis);
    const auto c = static_cast<Eigen::Index>(i);
    j.block<3, 1>(0, c) = z.cross(p - f.translation);
    j.block<3, 1>(3, c) = z;
  }
  return j;
}

bool has_frame(const KinematicChain& chain, const std::string& frame) {
  if (frame == "base" || frame == "gripper") return true;
  for (std::size_t i = 1; i <= chain.dof(); ++i) {
    if (frame == fmt::format("link{}", i)) return true;
  }
  return false;
}

Pose frame_pose(const KinematicChain& chain, const FkResult& fk, const std::string& frame) {
  if (frame == "base") return fk.links.front();
  if (frame == "gripper") return fk.gripper;
  for (std::size_t i = 1; i <= chain.dof(); ++i) {
    if (frame == fmt::format("link{}", i)) return fk.links[i];
  }
  throw Error(ErrorCategory::not_found, fmt::format("unknown robot frame '{}'", frame));
}

std::vector<std::vector<Capsule>> posed_capsules(const KinematicChain& chain, const FkResult& fk, double gripper) {
  std::vector<std::vector<Capsule>> out(chain.link_capsules.size() + 1);
  auto place = [](const Pose& p, const Capsule& c) { return Capsule{p.apply(c.a), p.apply(c.b), c.radius}; };
  for (std::size_t i = 0; i < chain.link_capsules.size(); ++i) {
    for (const auto& c : chain.link_capsules[i]) out[i].push_back(place(fk.links[i], c));
  }
  auto& hand = out.back();
  for (const auto& c : chain.hand_capsules) hand.push_back(place(fk.gripper, c));
  const Eigen::Vector3d shift(0, 0.5 * gripper, 0);
  const Eigen::Vector3d mirror(1, -1, 1);
  hand.push_back(place(fk.gripper, Capsule{chain.finger.a + shift, chain.finger.b + shift, chain.finger.radius}));
  hand.push_back(place(fk.gripper, Capsule{(chain.finger.a + shift).cwiseProduct(mirror),
                                           (chain.finger.b + shift).cwiseProduct(mirror), chain.finger.radius}));
  return out;
}

KinematicChain franka_like_chain() {
  constexpr double pi = M_PI;
  struct Dh {
    double a, d, alpha, lower, upper;
  };
  const Dh dh[7] = {
      {0.0, 0.333, 0.0, -2.8973, 2.8973},          {0.0, 0.0, -pi / 2, -1.7628, 1.7628},
      {0.0, 0.316, pi / 2, -2.8973, 2.8973},       {0.0825, 0.0, pi / 2, -3.0718, -0.0698},
      {-0.0825, 0.384, -pi / 2, -2.8973, 2.8973},  {0.0, 0.0, pi / 2, -0.0175, 3.7525},
      {0.088, 0.0, pi / 2, -2.8973, 2.8973},
  };
  KinematicChain chain;
  for (int i = 0; i < 7; ++i) {
    const Eigen::Quaterniond rx(Eigen::AngleAxisd(dh[i].alpha, Eigen::Vector3d::UnitX()));
    Joint j;
    j.name = fmt::format("joint{}", i + 1);
    j.origin = Pose(rx, rx * Eigen::Vector3d(dh[i].a, 0.0, dh[i].d));
    j.lower = dh[i].lower;
    j.upper = dh[i].upper;
    chain.joints.push_back(j);
  }
  chain.flange_to_gripper = Pose::from_translation({0, 0, 0.107}) *
                            Pose::from_axis_angle(Eigen::Vector3d::UnitZ(), -pi / 4) *
                            Pose::from_translation({0, 0, 0.1034});
  chain.link_capsules = {
      {{{0, 0, 0.08}, {0, 0, 0.16}, 0.07}},
      {{{0, 0, -0.19}, {0, 0, -0.05}, 0.065}},
      {{{0, 0, -0.06}, {0, 0, 0.06}, 0.06}, {{0, -0.05, 0}, {0, -0.19, 0}, 0.06}},
      {{{0, 0, -0.15}, {0, 0, 0}, 0.06}, {{0, 0, 0}, {0.0825, 0, 0}, 0.055}},
      {{{0, 0, 0}, {-0.0825, 0.12, 0}, 0.055}},
      {{{0, 0, -0.26}, {0, 0, -0.06}, 0.05}},
      {{{0, 0, 0}, {0.088, 0, 0}, 0.045}},
      {{{0, 0, 0}, {0, 0, 0.107}, 0.04}},
  };
  chain.hand_capsules = {{{0, -0.075, -0.06}, {0, 0.075, -0.06}, 0.03}};
  chain.finger = {{0, 0.01, -0.045}, {0, 0.01, -0.008}, 0.009};
  chain.gripper_max_opening = 0.08;
  chain.home.resize(7);
  chain.home << 0.0, -pi / 4, 0.0, -3 * pi / 4, 0.0, pi / 2, pi / 4;
  return chain;
}

}  // namespace splatsim
