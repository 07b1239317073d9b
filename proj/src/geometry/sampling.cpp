#include "splatsim/geometry/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "splatsim/core/error.hpp"

namespace splatsim {

PointCloud sample_points_on_mesh(const TriangleMesh& mesh, std::size_t n, Rng& rng) {
  if (n == 0) throw invalid_argument("sample count must be at least 1");
  mesh.validate();
  std::vector<double> cumulative(mesh.faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    total += mesh.face_area(f);
    cumulative[f] = total;
  }
  if (!(total > 0.0)) throw invalid_argument("cannot sample a mesh with zero surface area");

  PointCloud cloud;
  cloud.points.reserve(n);
  cloud.normals.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double target = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    if (it == cumulative.end()) --it;
    // Zero-area faces have an empty cumulative interval and are never hit.
    const auto f = static_cast<std::size_t>(it - cumulative.begin());
    const Face& face = mesh.faces[f];
    const double r1 = std::sqrt(rng.uniform()), r2 = rng.uniform();
    const Eigen::Vector3d& a = mesh.vertices[face[0]];
    const Eigen::Vector3d& b = mesh.vertices[face[1]];
    const Eigen::Vector3d& c = mesh.vertices[face[2]];
    cloud.points.push_back((1.0 - r1) * a + r1 * (1.0 - r2) * b + r1 * r2 * c);
    cloud.normals.push_back(mesh.face_normal(f));
  }
  return cloud;
}

}  // namespace splatsim
