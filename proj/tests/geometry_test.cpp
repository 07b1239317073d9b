#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"
#include "splatsim/core/error.hpp"
#include "splatsim/core/mesh_shapes.hpp"
#include "splatsim/core/rng.hpp"
#include "splatsim/geometry/bvh.hpp"
#include "splatsim/geometry/kdtree.hpp"
#include "splatsim/geometry/mesh_processing.hpp"
#include "splatsim/geometry/normals.hpp"
#include "splatsim/geometry/point_cloud.hpp"
#include "splatsim/geometry/primitives.hpp"
#include "splatsim/geometry/sampling.hpp"
#include "mesh_oracles.hpp"

using namespace splatsim;
using namespace splatsim::testing;
using Eigen::Vector3d;

namespace {

// Independent point-triangle distance: in-plane barycentric test, else the
// nearest edge.
double oracle_point_triangle(const Vector3d& p, const Vector3d& a, const Vector3d& b, const Vector3d& c) {
  auto seg = [&](const Vector3d& s0, const Vector3d& s1) {
    const Vector3d d = s1 - s0;
    const double t = std::clamp((p - s0).dot(d) / d.squaredNorm(), 0.0, 1.0);
    return (s0 + t * d - p).norm();
  };
  const Vector3d n = (b - a).cross(c - a).normalized();
  const Vector3d q = p - n * (p - a).dot(n);
  Eigen::Matrix<double, 3, 2> m;
  m.col(0) = b - a;
  m.col(1) = c - a;
  const Eigen::Vector2d uv = (m.transpose() * m).ldlt().solve(m.transpose() * (q - a));
  if (uv.x() >= 0 && uv.y() >= 0 && uv.x() + uv.y() <= 1) return (q - p).norm();
  return std::min({seg(a, b), seg(b, c), seg(c, a)});
}

double oracle_point_mesh(const TriangleMesh& mesh, const Vector3d& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const Face& f : mesh.faces) {
    best = std::min(best, oracle_point_triangle(p, mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]));
  }
  return best;
}

// Distance from a segment to a triangle is convex along the segment, so a
// golden-section search over the segment parameter converges to it.
double oracle_segment_triangle(const Vector3d& s0, const Vector3d& s1, const Vector3d& a, const Vector3d& b,
                               const Vector3d& c) {
  auto f = [&](double t) { return oracle_point_triangle(s0 + t * (s1 - s0), a, b, c); };
  double lo = 0.0, hi = 1.0;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
    if (f(m1) < f(m2)) hi = m2;
    else lo = m1;
  }
  return std::min({f(0.0), f(1.0), f(0.5 * (lo + hi))});
}

TriangleMesh random_soup(Rng& rng, int n) {
  TriangleMesh mesh;
  for (int i = 0; i < n; ++i) {
    const Vector3d center(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    for (int k = 0; k < 3; ++k) {
      mesh.vertices.push_back(center + Vector3d(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)));
    }
    const auto b = static_cast<std::uint32_t>(3 * i);
    mesh.faces.push_back({b, b + 1, b + 2});
  }
  return mesh;
}

}  // namespace

TEST_CASE("BVH over a cube holds every triangle in exactly one leaf") {
  const TriangleMesh cube = make_box({1, 1, 1});
  const Bvh bvh(cube);
  std::multiset<std::uint32_t> seen;
  for (const auto& node : bvh.nodes()) {
    if (node.is_leaf()) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) seen.insert(bvh.leaf_triangles()[i]);
    } else {
      CHECK(node.box.contains(bvh.nodes()[node.left].box));
      CHECK(node.box.contains(bvh.nodes()[node.right].box));
    }
  }
  CHECK(seen.size() == 12);
  CHECK(std::set<std::uint32_t>(seen.begin(), seen.end()).size() == 12);
  CHECK(bvh.closest_point({0, 0, 0}).distance == doctest::Approx(0.5));
  CHECK(bvh.closest_point({0, 0, 0.5}).distance == doctest::Approx(0.0));
}

TEST_CASE("empty mesh cannot build a BVH") { CHECK_THROWS_AS(Bvh(TriangleMesh{}), Error); }

TEST_CASE("BVH point distances equal a brute-force scan") {
  Rng rng(1);
  const TriangleMesh soup = random_soup(rng, 300);
  const Bvh bvh(soup);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vector3d p(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
    const auto r = bvh.closest_point(p);
    worst = std::max(worst, std::abs(r.distance - oracle_point_mesh(soup, p)));
    CHECK(std::abs((r.point - p).norm() - r.distance) < 1e-12);
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("capsule against a table plane") {
  TriangleMesh table = make_grid(4, 4, 1.0, 1.0);
  const Bvh bvh(table);
  CHECK_FALSE(bvh.capsule_intersects({0.5, 0.5, 1.0}, {0.6, 0.5, 1.2}, 0.1));
  CHECK(bvh.capsule_intersects({0.5, 0.5, 0.05}, {0.6, 0.5, 0.05}, 0.1));
  // Axis passing a vertex at distance r - eps touches, r + eps does not.
  const double r = 0.05, eps = 1e-7;
  const Vector3d vtx(0.5, 0.5, 0.0);
  CHECK(bvh.capsule_intersects(vtx + Vector3d(-0.1, 0, r - eps), vtx + Vector3d(0.1, 0, r - eps), r));
  CHECK_FALSE(bvh.capsule_intersects(vtx + Vector3d(-0.1, 0, r + eps), vtx + Vector3d(0.1, 0, r + eps), r));
}

TEST_CASE("capsule queries agree with a brute-force triangle scan") {
  Rng rng(2);
  const TriangleMesh soup = random_soup(rng, 200);
  const Bvh bvh(soup);
  int checked = 0, hits = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vector3d a(rng.uniform(-1.3, 1.3), rng.uniform(-1.3, 1.3), rng.uniform(-1.3, 1.3));
    const Vector3d b = a + Vector3d(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
    const double radius = rng.uniform(0.005, 0.1);
    double nearest = std::numeric_limits<double>::infinity();
    for (const Face& f : soup.faces) {
      nearest = std::min(nearest, oracle_segment_triangle(a, b, soup.vertices[f[0]], soup.vertices[f[1]],
                                                          soup.vertices[f[2]]));
    }
    // The search oracle is accurate to ~1e-9; skip razor-edge cases.
    if (std::abs(nearest - radius) < 1e-6) continue;
    ++checked;
    const bool expected = nearest <= radius;
    hits += expected;
    CHECK(bvh.capsule_intersects(a, b, radius) == expected);
  }
  CHECK(checked > 990);
  CHECK(hits > 50);
}

TEST_CASE("triangle proximity agrees with pairwise distances") {
  Rng rng(3);
  const TriangleMesh soup = random_soup(rng, 100);
  const Bvh bvh(soup);
  for (int i = 0; i < 200; ++i) {
    const Vector3d c(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Vector3d t0 = c + Vector3d(0.1, 0, 0), t1 = c + Vector3d(0, 0.1, 0.02), t2 = c + Vector3d(0, 0, 0.1);
    const double r = 0.02;
    bool expected = false;
    for (const Face& f : soup.faces) {
      expected |= triangle_triangle_squared_distance(t0, t1, t2, soup.vertices[f[0]], soup.vertices[f[1]],
                                                     soup.vertices[f[2]]) <= r * r;
    }
    CHECK(bvh.triangle_within(t0, t1, t2, r) == expected);
  }
}

TEST_CASE("segment-triangle distance is zero when the segment pierces the face") {
  CHECK(segment_triangle_squared_distance({0.2, 0.2, -1}, {0.2, 0.2, 1}, {0, 0, 0}, {1, 0, 0}, {0, 1, 0}) == 0.0);
  CHECK(segment_triangle_squared_distance({0.2, 0.2, 0.5}, {0.2, 0.2, 1}, {0, 0, 0}, {1, 0, 0}, {0, 1, 0}) ==
        doctest::Approx(0.25));
}

TEST_CASE("k-d tree matches brute force nearest and knn") {
  Rng rng(4);
  std::vector<Vector3d> pts(2000);
  for (auto& p : pts) p = {rng.uniform(), rng.uniform(), rng.uniform()};
  const KdTree tree(pts);
  for (int i = 0; i < 300; ++i) {
    const Vector3d q(rng.uniform(), rng.uniform(), rng.uniform());
    std::vector<std::pair<double, std::uint32_t>> all;
    for (std::uint32_t j = 0; j < pts.size(); ++j) all.push_back({(pts[j] - q).squaredNorm(), j});
    std::sort(all.begin(), all.end());
    CHECK(tree.nearest(q).index == all[0].second);
    const auto knn = tree.knn(q, 10);
    REQUIRE(knn.size() == 10);
    for (int k = 0; k < 10; ++k) CHECK(knn[k].index == all[k].second);
    CHECK(tree.nearest(q, all[0].first * 0.5).index == pts.size());
  }
}

TEST_CASE("samples on a single triangle lie in its plane") {
  TriangleMesh tri;
  tri.vertices = {{0.1, 0.2, 0.3}, {1.2, -0.4, 0.5}, {0.3, 0.9, -0.7}};
  tri.faces = {{0, 1, 2}};
  Rng rng(5);
  const PointCloud cloud = sample_points_on_mesh(tri, 1000, rng);
  for (const auto& p : cloud.points) {
    CHECK(oracle_point_triangle(p, tri.vertices[0], tri.vertices[1], tri.vertices[2]) < 1e-9);
  }
  cloud.validate();
}

TEST_CASE("sample counts follow face areas") {
  TriangleMesh m;
  m.vertices = {{0, 0, 0}, {3, 0, 0}, {0, 1, 0}, {10, 0, 0}, {11, 0, 0}, {10, 1, 0}};
  m.faces = {{0, 1, 2}, {3, 4, 5}};
  Rng rng(6);
  const std::size_t n = 40000;
  const PointCloud cloud = sample_points_on_mesh(m, n, rng);
  std::size_t first = 0;
  for (const auto& p : cloud.points) first += p.x() < 5.0;
  // Binomial(n, 3/4): 3 sigma band.
  const double mean = 0.75 * n, sigma = std::sqrt(n * 0.75 * 0.25);
  CHECK(std::abs(static_cast<double>(first) - mean) < 3.0 * sigma);
}

TEST_CASE("sampling is deterministic per seed and rejects degenerate input") {
  const TriangleMesh sphere = make_uv_sphere(1.0, 8, 8);
  Rng a(7), b(7);
  CHECK(sample_points_on_mesh(sphere, 100, a).points == sample_points_on_mesh(sphere, 100, b).points);
  TriangleMesh flat;
  flat.vertices = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  flat.faces = {{0, 1, 2}};
  CHECK_THROWS_AS(sample_points_on_mesh(flat, 10, a), Error);
  CHECK_THROWS_AS(sample_points_on_mesh(sphere, 0, a), Error);
}

TEST_CASE("depth back-projection") {
  CameraView cam;
  cam.fx = cam.fy = 100;
  cam.cx = 2;
  cam.cy = 1;
  cam.width = 5;
  cam.height = 3;
  DepthImage depth(5, 3);
  depth.at(2, 1) = 1.0f;
  const PointCloud cloud = depth_to_pointcloud(depth, cam);
  REQUIRE(cloud.size() == 1);
  CHECK((cloud.points[0] - Vector3d(0, 0, 1)).norm() < 1e-12);
  CHECK_THROWS_AS(depth_to_pointcloud(DepthImage(4, 3), cam), Error);

  CameraView big = CameraView::look_at({0.5, -1, 1}, {0, 0, 0}, {0, 0, 1}, 320, 240, 60);
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const Vector3d p(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2));
    const auto uvz = *big.project(p);
    const Vector3d back = big.camera_to_world().apply(big.unproject(uvz.x(), uvz.y(), uvz.z()));
    CHECK((back - p).norm() < 1e-6);
  }
}

TEST_CASE("filling the missing face of a cube restores a closed surface") {
  TriangleMesh cube = make_box({1, 1, 1});
  cube.faces.erase(cube.faces.begin(), cube.faces.begin() + 2);
  CHECK(count_boundary_edges(cube) == 4);
  HoleFillStats stats;
  const TriangleMesh filled = fill_holes(cube, kDefaultMaxLoopLength, &stats);
  CHECK(stats.loops_filled == 1);
  CHECK(is_watertight(filled));
  CHECK(euler_characteristic(filled) == 2);
  double volume = 0.0;
  for (const Face& f : filled.faces) {
    volume += filled.vertices[f[0]].dot(filled.vertices[f[1]].cross(filled.vertices[f[2]])) / 6.0;
  }
  CHECK(volume == doctest::Approx(1.0));
}

TEST_CASE("hole filling leaves closed meshes untouched and caps open cylinders") {
  const TriangleMesh sphere = make_uv_sphere(1.0, 10, 12);
  const TriangleMesh same = fill_holes(sphere);
  CHECK(same.faces == sphere.faces);
  CHECK(same.vertices == sphere.vertices);

  const TriangleMesh tube = make_cylinder(0.5, 1.0, 24, false);
  HoleFillStats stats;
  const TriangleMesh capped = fill_holes(tube, kDefaultMaxLoopLength, &stats);
  CHECK(stats.loops_found == 2);
  CHECK(stats.loops_filled == 2);
  CHECK(count_boundary_edges(capped) == 0);
  CHECK(euler_characteristic(capped) == 2);

  HoleFillStats limited;
  fill_holes(tube, 10, &limited);
  CHECK(limited.loops_skipped == 2);
}

TEST_CASE("smoothing fixes flat grids and averages a spike") {
  const TriangleMesh grid = make_grid(6, 6, 1.0, 1.0);
  const TriangleMesh smoothed = smooth_mesh(grid, 10, 1.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.vertices.size(); ++i) {
    worst = std::max(worst, (smoothed.vertices[i] - grid.vertices[i]).norm());
  }
  CHECK(worst < 1e-9);

  TriangleMesh spiky = grid;
  const std::size_t center = 3 * 7 + 3;
  spiky.vertices[center].z() = 0.4;
  const TriangleMesh once = smooth_mesh(spiky, 1, 1.0);
  CHECK(once.vertices[center].z() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(once.faces == spiky.faces);
  CHECK_THROWS_AS(smooth_mesh(grid, 1, 0.0), Error);
}

TEST_CASE("smoothing strictly reduces radial noise on a sphere") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TriangleMesh clean = make_icosphere(1.0, 3);
    TriangleMesh noisy = clean;
    Rng rng(seed);
    for (auto& v : noisy.vertices) v *= 1.0 + rng.normal(0.0, 0.02);
    const double before = rms_about_mean_radius(noisy);
    double previous = radial_noise(noisy, clean);
    TriangleMesh current = noisy, reference = clean;
    for (int i = 0; i < 10; ++i) {
      current = smooth_mesh(current, 1, kDefaultSmoothLambda);
      reference = smooth_mesh(reference, 1, kDefaultSmoothLambda);
      const double noise = radial_noise(current, reference);
      CHECK(noise < previous);
      previous = noise;
    }
    // Deviation from a sphere of the mean radius, operator bias included.
    CHECK(rms_about_mean_radius(current) < 0.5 * before);
  }
}

TEST_CASE("planar grid simplifies to two faces without error") {
  const TriangleMesh grid = make_grid(10, 10, 1.0, 2.0);
  REQUIRE(grid.faces.size() == 200);
  SimplifyStats stats;
  const TriangleMesh out = simplify_mesh(grid, 2, &stats);
  CHECK(out.faces.size() == 2);
  CHECK(stats.max_collapse_error < 1e-18);
  for (const auto& v : out.vertices) CHECK(std::abs(v.z()) < 1e-12);
  CHECK(out.surface_area() == doctest::Approx(2.0));
  CHECK((out.bounds().extents() - grid.bounds().extents()).norm() < 1e-12);
}

TEST_CASE("subdivided cube simplifies to 12 faces within the Hausdorff bound") {
  const TriangleMesh cube = make_subdivided_box({1, 1, 1}, 8);
  REQUIRE(cube.faces.size() == 768);
  const TriangleMesh out = simplify_mesh(cube, 12);
  CHECK(out.faces.size() <= 12);
  CHECK(is_watertight(out));
  const double diag = cube.bounds().diagonal();
  CHECK(sampled_hausdorff(cube, out, 20000) < 1e-3 * diag);
  CHECK((out.bounds().min - cube.bounds().min).norm() < 1e-3 * diag);
  CHECK((out.bounds().max - cube.bounds().max).norm() < 1e-3 * diag);
}

TEST_CASE("simplification never grows and leaves small meshes alone") {
  const TriangleMesh box = make_box({1, 2, 3});
  CHECK(simplify_mesh(box, 12).faces == box.faces);
  CHECK(simplify_mesh(box, 100).faces == box.faces);
  const TriangleMesh sphere = make_uv_sphere(1.0, 16, 24);
  for (std::size_t target : {400u, 100u, 20u}) {
    const TriangleMesh out = simplify_mesh(sphere, target);
    CHECK(out.faces.size() <= target);
    CHECK(out.faces.size() <= sphere.faces.size());
    out.validate();
    const Aabb a = out.bounds(), b = sphere.bounds();
    CHECK((a.min - b.min).cwiseAbs().maxCoeff() < 1e-3 * b.diagonal());
    CHECK((a.max - b.max).cwiseAbs().maxCoeff() < 1e-3 * b.diagonal());
  }
  CHECK_THROWS_AS(simplify_mesh(sphere, 1), Error);
}

TEST_CASE("non-manifold edges are counted and left in place") {
  TriangleMesh fin = make_grid(2, 1, 1.0, 1.0);
  fin.normals.clear();
  const auto top = static_cast<std::uint32_t>(fin.vertices.size());
  fin.vertices.push_back({0.5, 0.5, 1.0});
  // A third face on the shared interior edge of the first cell.
  const Face first = fin.faces[0];
  fin.faces.push_back({first[0], first[2], top});
  SimplifyStats stats;
  simplify_mesh(fin, 2, &stats);
  CHECK(stats.non_manifold_edges >= 1);
}

TEST_CASE("normal estimation on planes and spheres") {
  Rng rng(12);
  PointCloud plane;
  for (int i = 0; i < 500; ++i) plane.points.push_back({rng.uniform(), rng.uniform(), 0.0});
  const PointCloud pn = estimate_normals(plane, 8, {0.5, 0.5, 2.0});
  for (const auto& n : pn.normals) CHECK((n - Vector3d(0, 0, 1)).norm() < 1e-9);
  const PointCloud below = estimate_normals(plane, 8, {0.5, 0.5, -2.0});
  for (const auto& n : below.normals) CHECK(n.z() == doctest::Approx(-1.0));

  PointCloud sphere;
  for (int i = 0; i < 10000; ++i) sphere.points.push_back(rng.unit_vector());
  const PointCloud sn = estimate_normals(sphere, 16, {0, 0, 0});
  double worst = 0.0;
  for (std::size_t i = 0; i < sn.size(); ++i) {
    CHECK(sn.normals[i].dot(-sn.points[i]) > 0.0);
    worst = std::max(worst, std::acos(std::min(1.0, std::abs(sn.normals[i].dot(sn.points[i])))));
  }
  CHECK(worst * 180.0 / std::numbers::pi < 5.0);
  CHECK_THROWS_AS(estimate_normals(plane, 2, {0, 0, 1}), Error);
  PointCloud tiny;
  tiny.points = {{0, 0, 0}, {1, 0, 0}};
  CHECK_THROWS_AS(estimate_normals(tiny, 3, {0, 0, 1}), Error);
}
