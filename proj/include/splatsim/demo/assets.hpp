#pragma once

#include <string>
#include <vector>

#include "splatsim/core/mesh.hpp"
#include "splatsim/core/scene.hpp"
#include "splatsim/demo/task.hpp"

namespace splatsim {

// Built-in object models. Object frames put the footprint center at the
// origin and the resting face at z = 0. Visual meshes carry vertex colors;
// collision meshes are closed.
struct Asset {
  std::string name;
  TriangleMesh visual;
  TriangleMesh collision;
  bool graspable = true;
};

std::vector<std::string> asset_names();
bool has_asset(const std::string& name);
// Throws not_found for an unknown name.
Asset make_asset(const std::string& name);

RigidObject instantiate(const std::string& id, const Asset& asset, const Pose& pose);

// Basket geometry: outer footprint, wall height and thickness.
inline const Eigen::Vector3d kBasketSize(0.22, 0.28, 0.08);
inline constexpr double kBasketWall = 0.01;

// Interior of an upright basket in the table plane (yaw is ignored; baskets
// are placed without yaw).
Rect basket_inner_region(const RigidObject& basket);

}  // namespace splatsim
