#include "splatsim/demo/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "splatsim/core/error.hpp"
#include "splatsim/demo/grasp.hpp"
#include "splatsim/kinematics/collision.hpp"

namespace splatsim {

namespace {

using Polygon = std::vector<Eigen::Vector3d>;

// Keeps the part of `poly` where sign * (p[axis] - bound) <= 0.
Polygon clip(const Polygon& poly, int axis, double bound, double sign) {
  Polygon out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d& a = poly[i];
    const Eigen::Vector3d& b = poly[(i + 1) % n];
    const double da = sign * (a[axis] - bound);
    const double db = sign * (b[axis] - bound);
    if (da <= 0) out.push_back(a);
    if ((da < 0 && db > 0) || (da > 0 && db < 0)) out.push_back(a + (b - a) * (da / (da - db)));
  }
  return out;
}

// Footprints are shrunk by this much so that touching neighbors (shared AABB
// faces) do not count as supports.
constexpr double kFootprintInset = 1e-3;

TriangleMesh shrunk_proxy(const TriangleMesh& mesh) {
  TriangleMesh proxy = mesh;
  const Aabb box = proxy.bounds();
  const Eigen::Vector3d center = box.center();
  const Eigen::Vector3d half = 0.5 * box.extents();
  Eigen::Vector3d scale;
  for (int k = 0; k < 3; ++k) scale[k] = half[k] > kAttachedProxyShrink ? (half[k] - kAttachedProxyShrink) / half[k] : 0.0;
  for (auto& v : proxy.vertices) v = center + (v - center).cwiseProduct(scale);
  return proxy;
}

}  // namespace

Aabb posed_bounds(const TriangleMesh& mesh, const Pose& pose) {
  Aabb box;
  for (const auto& v : mesh.vertices) box.extend(pose.apply(v));
  return box;
}

double yaw_of(const Pose& pose) {
  const Eigen::Matrix3d r = pose.rotation_matrix();
  return std::atan2(r(1, 0), r(0, 0));
}

Simulator::Simulator(KinematicChain chain, const Pose& robot_base, std::vector<RigidObject> objects,
                     const TriangleMesh& background_world, double table_height)
    : chain_(std::move(chain)), base_(robot_base), objects_(std::move(objects)), table_height_(table_height) {
  chain_.validate();
  if (!background_world.empty()) background_ = std::make_shared<const Bvh>(background_world);
}

int Simulator::object_index(const std::string& id) const {
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    if (objects_[i].id == id) return static_cast<int>(i);
  }
  throw Error(ErrorCategory::not_found, fmt::format("no object '{}' in the simulation", id));
}

SimState Simulator::initial_state(const Eigen::VectorXd& q) const {
  if (q.size() != static_cast<Eigen::Index>(chain_.dof())) {
    throw invalid_argument(fmt::format("initial configuration has {} joints, chain has {}", q.size(), chain_.dof()));
  }
  SimState s;
  s.q = q;
  s.gripper = chain_.gripper_max_opening;
  for (const auto& o : objects_) s.object_poses.push_back(o.pose);
  return s;
}

Pose Simulator::gripper_pose(const Eigen::VectorXd& q) const { return forward_kinematics(chain_, q, base_).gripper; }

PrivilegedObservation Simulator::observe(const SimState& state) const {
  PrivilegedObservation o;
  o.object_poses = state.object_poses;
  o.gripper_pose = gripper_pose(state.q);
  o.gripper_opening = state.gripper;
  o.attached = state.attached;
  return o;
}

std::vector<RigidObject> Simulator::posed_objects(const SimState& state) const {
  std::vector<RigidObject> out = objects_;
  for (std::size_t i = 0; i < out.size(); ++i) out[i].pose = state.object_poses[i];
  return out;
}

int Simulator::find_graspable(const SimState& state, const Pose& tcp) const {
  const Eigen::Vector3d closing = tcp.rotate(Eigen::Vector3d::UnitY());
  int best = -1;
  double best_d = kGraspTolerance;
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    if (!objects_[i].graspable) continue;
    RigidObject posed = objects_[i];
    posed.pose = state.object_poses[i];
    GraspPlan plan;
    try {
      plan = compute_grasp(posed, chain_.gripper_max_opening);
    } catch (const Error&) {
      continue;
    }
    const double d = (plan.grasp.translation - tcp.translation).norm();
    if (d > best_d) continue;
    if (extent_along(posed, closing) > state.gripper) continue;
    best = static_cast<int>(i);
    best_d = d;
  }
  return best;
}

double Simulator::support_below(const SimState& state, int object, const Pose& pose, double max_z, int ignore) const {
  const Aabb box = posed_bounds(objects_[object].collision, pose);
  const double x0 = box.min.x() + kFootprintInset, x1 = box.max.x() - kFootprintInset;
  const double y0 = box.min.y() + kFootprintInset, y1 = box.max.y() - kFootprintInset;
  double best = table_height_;
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    if (static_cast<int>(i) == object || static_cast<int>(i) == ignore) continue;
    const Pose& p = state.object_poses[i];
    const Aabb other = posed_bounds(objects_[i].collision, p);
    if (other.max.x() < x0 || other.min.x() > x1 || other.max.y() < y0 || other.min.y() > y1) continue;
    if (other.min.z() > max_z) continue;
    const TriangleMesh& m = objects_[i].collision;
    for (const auto& f : m.faces) {
      Polygon poly = {p.apply(m.vertices[f[0]]), p.apply(m.vertices[f[1]]), p.apply(m.vertices[f[2]])};
      poly = clip(poly, 0, x0, -1);
      if (poly.empty()) continue;
      poly = clip(poly, 0, x1, 1);
      if (poly.empty()) continue;
      poly = clip(poly, 1, y0, -1);
      if (poly.empty()) continue;
      poly = clip(poly, 1, y1, 1);
      if (poly.empty()) continue;
      poly = clip(poly, 2, max_z, 1);
      for (const auto& v : poly) best = std::max(best, v.z());
    }
  }
  return best;
}

Pose Simulator::settled_pose(const SimState& state, int object) const {
  const Pose& pose = state.object_poses[object];
  const double bottom = posed_bounds(objects_[object].collision, pose).min.z();
  const double support = support_below(state, object, pose, bottom + 1e-9);
  Pose out = pose;
  out.translation.z() += support - bottom;
  return out;
}

SimState Simulator::step(const SimState& state, const Action& action) const {
  SimState next = state;
  next.q = chain_.clamp(action.q);
  const Pose tcp = gripper_pose(next.q);

  const double max_open = chain_.gripper_max_opening;
  const double target = std::clamp(action.gripper, 0.0, 1.0) * max_open;
  const double rate = max_open / kGripperTravelSteps;
  if (target < state.gripper) {
    double opening = std::max(target, state.gripper - rate);
    if (next.attached < 0) {
      const int candidate = find_graspable(state, tcp);
      if (candidate >= 0) {
        RigidObject posed = objects_[candidate];
        posed.pose = state.object_poses[candidate];
        const double width = extent_along(posed, tcp.rotate(Eigen::Vector3d::UnitY()));
        if (opening <= width) {
          next.attached = candidate;
          next.attach_offset = tcp.inverse() * state.object_poses[candidate];
        }
      }
    }
    if (next.attached >= 0 && next.attached == state.attached) {
      // Fingers rest on the held object.
      opening = state.gripper;
    } else if (next.attached >= 0) {
      RigidObject posed = objects_[next.attached];
      posed.pose = state.object_poses[next.attached];
      opening = extent_along(posed, tcp.rotate(Eigen::Vector3d::UnitY()));
    }
    next.gripper = opening;
  } else if (target > state.gripper) {
    next.gripper = std::min(target, state.gripper + rate);
  }

  if (next.attached >= 0) {
    const int held = next.attached;
    if (target > state.gripper) {
      // Released: the object keeps its last carried pose and drops.
      next.attached = -1;
      next.object_poses[held] = tcp * next.attach_offset;
      next.attach_offset = Pose();
      next.object_poses[held] = settled_pose(next, held);
    } else {
      next.object_poses[held] = tcp * next.attach_offset;
    }
  }
  return next;
}

bool Simulator::audit(const SimState& state) const {
  if (state.attached < 0 || !background_) return true;
  const TriangleMesh proxy = shrunk_proxy(objects_[state.attached].collision);
  const Pose& p = state.object_poses[state.attached];
  for (const auto& f : proxy.faces) {
    if (background_->triangle_within(p.apply(proxy.vertices[f[0]]), p.apply(proxy.vertices[f[1]]),
                                     p.apply(proxy.vertices[f[2]]), 0.0)) {
      return false;
    }
  }
  return true;
}

}  // namespace splatsim
