#include "splatsim/kinematics/collision.hpp"

#include <algorithm>

#include "splatsim/geometry/primitives.hpp"

namespace splatsim {

std::vector<BvhPtr> scene_obstacles(const Scene& scene, const std::vector<std::string>& exclude) {
  std::vector<BvhPtr> out;
  if (!scene.background_mesh.empty()) {
    out.push_back(std::make_shared<const Bvh>(scene.background_mesh, scene.background.local_to_world));
  }
  for (const auto& obj : scene.objects) {
    if (std::find(exclude.begin(), exclude.end(), obj.id) != exclude.end()) continue;
    if (obj.collision.empty()) continue;
    out.push_back(std::make_shared<const Bvh>(obj.collision, obj.pose));
  }
  return out;
}

bool capsules_intersect(const Capsule& a, const Capsule& b) {
  const double r = a.radius + b.radius;
  return segment_segment_squared_distance(a.a, a.b, b.a, b.b) <= r * r;
}

namespace {

bool self_hit(const std::vector<std::vector<Capsule>>& caps) {
  for (std::size_t i = 0; i < caps.size(); ++i) {
    for (std::size_t j = i + 2; j < caps.size(); ++j) {
      for (const auto& ca : caps[i]) {
        for (const auto& cb : caps[j]) {
          if (capsules_intersect(ca, cb)) return true;
        }
      }
    }
  }
  return false;
}

bool obstacle_hit(const std::vector<std::vector<Capsule>>& caps, const std::vector<BvhPtr>& obstacles) {
  for (const auto& bvh : obstacles) {
    for (const auto& link : caps) {
      for (const auto& c : link) {
        if (bvh->capsule_intersects(c.a, c.b, c.radius)) return true;
      }
    }
  }
  return false;
}

}  // namespace

bool config_in_collision(const KinematicChain& chain, const Eigen::VectorXd& q, double gripper, const Pose& base,
                         const std::vector<BvhPtr>& obstacles) {
  const auto caps = posed_capsules(chain, forward_kinematics(chain, q, base), gripper);
  return obstacle_hit(caps, obstacles) || self_hit(caps);
}

CollisionChecker::CollisionChecker(KinematicChain chain, const Pose& base, std::vector<BvhPtr> obstacles)
    : chain_(std::move(chain)), base_(base), obstacles_(std::move(obstacles)) {
  chain_.validate();
}

void CollisionChecker::attach(const TriangleMesh& mesh_in_gripper) {
  TriangleMesh proxy = mesh_in_gripper;
  const Aabb box = proxy.bounds();
  const Eigen::Vector3d center = 0.5 * (box.min + box.max);
  const Eigen::Vector3d half = 0.5 * (box.max - box.min);
  Eigen::Vector3d scale;
  for (int k = 0; k < 3; ++k) scale[k] = half[k] > kAttachedProxyShrink ? (half[k] - kAttachedProxyShrink) / half[k] : 0.0;
  for (auto& v : proxy.vertices) v = center + (v - center).cwiseProduct(scale);
  attached_ = std::move(proxy);
}

bool CollisionChecker::env_hit(const std::vector<std::vector<Capsule>>& caps) const {
  return obstacle_hit(caps, obstacles_);
}

bool CollisionChecker::attached_hit(const FkResult& fk) const {
  if (!attached_) return false;
  const TriangleMesh& m = *attached_;
  for (const auto& f : m.faces) {
    const Eigen::Vector3d a = fk.gripper.apply(m.vertices[f[0]]);
    const Eigen::Vector3d b = fk.gripper.apply(m.vertices[f[1]]);
    const Eigen::Vector3d c = fk.gripper.apply(m.vertices[f[2]]);
    for (const auto& bvh : obstacles_) {
      if (bvh->triangle_within(a, b, c, 0.0)) return true;
    }
  }
  return false;
}

bool CollisionChecker::self_collision(const Eigen::VectorXd& q) const {
  return self_hit(posed_capsules(chain_, forward_kinematics(chain_, q, base_), gripper_));
}

bool CollisionChecker::environment_collision(const Eigen::VectorXd& q) const {
  const FkResult fk = forward_kinematics(chain_, q, base_);
  return env_hit(posed_capsules(chain_, fk, gripper_)) || attached_hit(fk);
}

bool CollisionChecker::in_collision(const Eigen::VectorXd& q) const {
  const FkResult fk = forward_kinematics(chain_, q, base_);
  const auto caps = posed_capsules(chain_, fk, gripper_);
  return env_hit(caps) || self_hit(caps) || attached_hit(fk);
}

}  // namespace splatsim
