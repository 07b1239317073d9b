#include "splatsim/demo/assets.hpp"

#include <fmt/format.h>

#include "splatsim/core/error.hpp"
#include "splatsim/core/mesh_shapes.hpp"

namespace splatsim {

namespace {

TriangleMesh translated(TriangleMesh mesh, const Eigen::Vector3d& offset) {
  for (auto& v : mesh.vertices) v += offset;
  return mesh;
}

TriangleMesh colored(TriangleMesh mesh, const Eigen::Vector3d& color) {
  paint(mesh, color);
  return mesh;
}

// Box resting on z = 0.
TriangleMesh block(const Eigen::Vector3d& size, const Eigen::Vector3d& color) {
  return colored(translated(make_box(size), {0, 0, size.z() / 2}), color);
}

TriangleMesh upright_cylinder(double radius, double height, double z0, const Eigen::Vector3d& color) {
  return colored(translated(make_cylinder(radius, height, 24), {0, 0, z0 + height / 2}), color);
}

Asset simple(const std::string& name, TriangleMesh visual, bool graspable = true) {
  Asset a{name, visual, visual, graspable};
  return a;
}

Asset bottle(const std::string& name, double scale, const Eigen::Vector3d& color) {
  const TriangleMesh body = upright_cylinder(0.032 * scale, 0.13 * scale, 0.0, color);
  const TriangleMesh shoulder = upright_cylinder(0.02 * scale, 0.03 * scale, 0.13 * scale, color);
  const TriangleMesh cap = upright_cylinder(0.014 * scale, 0.02 * scale, 0.16 * scale, {0.92, 0.92, 0.9});
  return simple(name, merge_meshes({body, shoulder, cap}));
}

Asset basket() {
  const double w = kBasketWall, h = kBasketSize.z();
  const double sx = kBasketSize.x(), sy = kBasketSize.y();
  const Eigen::Vector3d color(0.55, 0.38, 0.22);
  std::vector<TriangleMesh> parts;
  parts.push_back(block({sx, sy, w}, color));
  parts.push_back(translated(block({w, sy, h}, color), {(sx - w) / 2, 0, 0}));
  parts.push_back(translated(block({w, sy, h}, color), {-(sx - w) / 2, 0, 0}));
  parts.push_back(translated(block({sx - 2 * w, w, h}, color), {0, (sy - w) / 2, 0}));
  parts.push_back(translated(block({sx - 2 * w, w, h}, color), {0, -(sy - w) / 2, 0}));
  return simple("basket", merge_meshes(parts), false);
}

struct Entry {
  const char* name;
  Asset (*make)();
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      {"bottle", [] { return bottle("bottle", 1.0, {0.2, 0.55, 0.3}); }},
      {"bottle_small", [] { return bottle("bottle_small", 0.6, {0.75, 0.3, 0.2}); }},
      {"cucumber",
       [] {
         const TriangleMesh m = colored(make_capsule({-0.08, 0, 0.022}, {0.08, 0, 0.022}, 0.022, 16, 4), {0.25, 0.5, 0.15});
         return simple("cucumber", m);
       }},
      {"board", [] { return simple("board", block({0.30, 0.20, 0.015}, {0.78, 0.6, 0.4}), false); }},
      {"basket", basket},
      {"cube_red", [] { return simple("cube_red", block(Eigen::Vector3d::Constant(0.04), {0.8, 0.15, 0.12})); }},
      {"cube_green", [] { return simple("cube_green", block(Eigen::Vector3d::Constant(0.04), {0.15, 0.7, 0.2})); }},
      {"cube_blue", [] { return simple("cube_blue", block(Eigen::Vector3d::Constant(0.04), {0.15, 0.3, 0.8})); }},
      {"can", [] { return simple("can", upright_cylinder(0.025, 0.07, 0.0, {0.85, 0.85, 0.2})); }},
      {"puck", [] { return simple("puck", upright_cylinder(0.03, 0.03, 0.0, {0.2, 0.2, 0.25})); }},
      {"block", [] { return simple("block", block({0.06, 0.03, 0.04}, {0.9, 0.5, 0.1})); }},
      {"box_tall", [] { return simple("box_tall", block({0.04, 0.05, 0.08}, {0.6, 0.3, 0.7})); }},
  };
  return entries;
}

}  // namespace

std::vector<std::string> asset_names() {
  std::vector<std::string> names;
  for (const auto& e : registry()) names.emplace_back(e.name);
  return names;
}

bool has_asset(const std::string& name) {
  for (const auto& e : registry()) {
    if (name == e.name) return true;
  }
  return false;
}

Asset make_asset(const std::string& name) {
  for (const auto& e : registry()) {
    if (name == e.name) return e.make();
  }
  throw Error(ErrorCategory::not_found, fmt::format("unknown asset '{}'", name));
}

RigidObject instantiate(const std::string& id, const Asset& asset, const Pose& pose) {
  return RigidObject::make(id, asset.visual, asset.collision, pose, asset.graspable);
}

Rect basket_inner_region(const RigidObject& basket) {
  Rect r;
  r.center = basket.pose.translation.head<2>();
  r.size = Eigen::Vector2d(kBasketSize.x() - 2 * kBasketWall, kBasketSize.y() - 2 * kBasketWall);
  return r;
}

}  // namespace splatsim
