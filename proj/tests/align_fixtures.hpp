#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "splatsim/core/camera.hpp"
#include "splatsim/core/mesh_shapes.hpp"
#include "splatsim/core/rng.hpp"
#include "splatsim/core/scene.hpp"
#include "splatsim/geometry/point_cloud.hpp"
#include "splatsim/geometry/sampling.hpp"

namespace splatsim::testing {

// Asymmetric assembly of chunky parts, about 0.3 m across, whose surface
// constrains all six rigid degrees of freedom. No part is thinner than the
// largest test perturbation, so opposite faces cannot be confused.
inline TriangleMesh registration_object() {
  return merge_meshes({
      make_box({0.30, 0.20, 0.08}),
      make_box({0.08, 0.20, 0.14}).transformed(Pose::from_translation({-0.11, 0.0, 0.11})),
      make_cylinder(0.04, 0.12, 24).transformed(Pose::from_translation({0.07, 0.04, 0.10})),
      make_box({0.08, 0.06, 0.06}).transformed(
          Pose::from_axis_angle(Eigen::Vector3d::UnitZ(), 0.5, {0.06, -0.07, 0.07})),
  });
}

// Random rigid motion with angle uniform in [0, max_angle] about a random
// axis and translation of length uniform in [0, max_translation].
inline Pose random_perturbation(Rng& rng, double max_angle, double max_translation) {
  return Pose::from_axis_angle(rng.unit_vector(), rng.uniform(0.0, max_angle),
                               rng.uniform(0.0, max_translation) * rng.unit_vector());
}

// Keeps the `fraction` of points with the smallest projection on a random
// direction.
inline PointCloud crop_fraction(const PointCloud& cloud, double fraction, Rng& rng) {
  const Eigen::Vector3d dir = rng.unit_vector();
  std::vector<double> proj;
  for (const auto& p : cloud.points) proj.push_back(p.dot(dir));
  std::vector<double> sorted = proj;
  const auto k = static_cast<std::size_t>(fraction * static_cast<double>(sorted.size()));
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(k), sorted.end());
  const double cut = sorted[k];
  PointCloud out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (proj[i] < cut) {
      out.points.push_back(cloud.points[i]);
      if (cloud.has_normals()) out.normals.push_back(cloud.normals[i]);
    }
  }
  return out;
}

inline void add_noise(PointCloud& cloud, double sigma, Rng& rng) {
  for (auto& p : cloud.points) p += sigma * Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
}

// Tabletop background: a solid table block with a back wall, a shelf block
// and a post, covered by flat splats lying on the surface. The solids are
// thick so hidden faces sit far from the visible ones, as in a surface
// reconstruction that only covers what the cameras saw.
inline Scene alignment_scene(std::uint64_t seed, std::size_t splats = 30000) {
  Scene scene;
  scene.background_mesh = merge_meshes({
      make_box({1.0, 0.8, 0.6}).transformed(Pose::from_translation({0.0, 0.0, -0.3})),
      make_box({0.3, 0.8, 0.30}).transformed(Pose::from_translation({-0.6, 0.0, 0.15})),
      make_box({0.20, 0.12, 0.10}).transformed(Pose::from_translation({-0.25, 0.25, 0.05})),
      make_cylinder(0.04, 0.20, 24).transformed(Pose::from_translation({0.15, -0.20, 0.10})),
  });
  Rng rng(seed);
  const PointCloud surface = sample_points_on_mesh(scene.background_mesh, splats, rng);
  for (std::size_t i = 0; i < surface.size(); ++i) {
    GaussianPrimitive g;
    g.mean = surface.points[i];
    g.rotation = Eigen::Quaterniond::FromTwoVectors(Eigen::Vector3d::UnitZ(), surface.normals[i]);
    g.scale = {0.008, 0.008, 0.0005};
    g.opacity = 0.9;
    g.color = {rng.uniform(0.3, 0.9), rng.uniform(0.3, 0.9), rng.uniform(0.3, 0.9)};
    scene.background.primitives.push_back(g);
  }
  scene.cameras["observer"] =
      CameraView::look_at({0.9, -0.6, 0.7}, {-0.1, 0.0, 0.05}, {0, 0, 1}, 320, 240, 55.0);
  return scene;
}

// Corners of a 10 cm marker lying on the table top, in the background frame.
inline std::vector<Eigen::Vector3d> marker_corners() {
  return {{0.20, 0.10, 0.0}, {0.30, 0.10, 0.0}, {0.30, 0.20, 0.0}, {0.20, 0.20, 0.0}};
}

}  // namespace splatsim::testing
