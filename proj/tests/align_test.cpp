#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "align_fixtures.hpp"
#include "splatsim/align/correspondence.hpp"
#include "splatsim/align/icp.hpp"
#include "splatsim/align/kabsch.hpp"
#include "splatsim/align/scene_alignment.hpp"
#include "splatsim/core/error.hpp"
#include "splatsim/geometry/normals.hpp"
#include "splatsim/render/compositor.hpp"
#include "splatsim/render/mesh_rasterizer.hpp"
#include "test_util.hpp"

using namespace splatsim;
using namespace splatsim::testing;

namespace {

constexpr double kDeg = M_PI / 180.0;

CorrespondenceSet marker_pairs(const Pose& truth) {
  CorrespondenceSet c;
  c.source = marker_corners();
  for (const auto& p : c.source) c.target.push_back(truth.apply(p));
  return c;
}

// Stand-in for a depth camera: the background surface rasterized at its
// true placement. Splat depth is not used because front-to-back weighting
// biases it toward the camera on oblique surfaces.
DepthImage observe(const Scene& scene, const Pose& true_background) {
  return to_depth_image(rasterize_mesh(scene.camera("observer"), {MeshInstance{&scene.background_mesh, true_background}}));
}

}  // namespace

TEST_CASE("kabsch on identical sets is the identity") {
  CorrespondenceSet c;
  c.source = c.target = marker_corners();
  const Pose p = estimate_pose_kabsch(c);
  CHECK(rotation_distance(p, Pose()) < 1e-12);
  CHECK(p.translation.norm() < 1e-12);
}

TEST_CASE("kabsch recovers a known transform exactly") {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const Pose truth = random_pose(rng, 2.0);
    const Pose got = estimate_pose_kabsch(marker_pairs(truth));
    CHECK(pose_difference(got, truth) <= 1e-9);
    CHECK(got.rotation_matrix().determinant() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("kabsch residual is the least-squares optimum") {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    CorrespondenceSet c;
    const Pose truth = random_pose(rng);
    for (int i = 0; i < 8; ++i) {
      c.source.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
      c.target.push_back(truth.apply(c.source.back()) + 0.01 * Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal()));
    }
    const Pose best = estimate_pose_kabsch(c);
    auto cost = [&](const Pose& p) {
      double s = 0;
      for (std::size_t i = 0; i < c.size(); ++i) s += (p.apply(c.source[i]) - c.target[i]).squaredNorm();
      return s;
    };
    // Small rigid perturbations never do better.
    for (int k = 0; k < 20; ++k) {
      const Pose nudge = random_perturbation(rng, 1e-3, 1e-3);
      CHECK(cost(nudge * best) >= cost(best) - 1e-12);
    }
  }
}

TEST_CASE("kabsch with 1 mm corner noise stays within 3 mm median") {
  Rng rng(3);
  std::vector<double> errors;
  for (int trial = 0; trial < 100; ++trial) {
    const Pose truth = random_pose(rng, 1.0);
    // Marker frame at the marker center, so translation error is measured there.
    CorrespondenceSet c;
    c.source = {{-0.05, -0.05, 0}, {0.05, -0.05, 0}, {0.05, 0.05, 0}, {-0.05, 0.05, 0}};
    for (const auto& p : c.source) c.target.push_back(truth.apply(p));
    for (auto& t : c.target) t += 0.001 * Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
    errors.push_back(translation_distance(estimate_pose_kabsch(c), truth));
  }
  std::nth_element(errors.begin(), errors.begin() + 50, errors.end());
  CHECK(errors[50] < 0.003);
}

TEST_CASE("kabsch is invariant to a common rigid motion") {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const Pose truth = random_pose(rng);
    CorrespondenceSet c;
    for (int i = 0; i < 6; ++i) {
      c.source.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
      c.target.push_back(truth.apply(c.source.back()) + 0.02 * Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal()));
    }
    const Pose base = estimate_pose_kabsch(c);
    const Pose motion = random_pose(rng, 3.0);
    CorrespondenceSet moved;
    for (std::size_t i = 0; i < c.size(); ++i) {
      moved.source.push_back(motion.apply(c.source[i]));
      moved.target.push_back(motion.apply(c.target[i]));
    }
    // Conjugated by the motion: T' = M T M^-1.
    CHECK(pose_difference(estimate_pose_kabsch(moved), motion * base * motion.inverse()) < 1e-9);
  }
}

TEST_CASE("kabsch rejects degenerate input") {
  CorrespondenceSet c;
  c.source = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  c.target = c.source;
  CHECK_THROWS_AS(estimate_pose_kabsch(c), Error);
  c.source = {{0, 0, 0}, {1, 0, 0}};
  c.target = c.source;
  CHECK_THROWS_AS(estimate_pose_kabsch(c), Error);
  c.source = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  c.target = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  CHECK_THROWS_AS(estimate_pose_kabsch(c), Error);
  c.target = {{0, 0, 0}, {1, 0, 0}};
  CHECK_THROWS_AS(estimate_pose_kabsch(c), Error);
}

TEST_CASE("icp on identical clouds stays at the identity") {
  Rng rng(5);
  const PointCloud target = sample_points_on_mesh(registration_object(), 5000, rng);
  const AlignmentResult r = icp_point_to_plane(target, target, Pose());
  CHECK(r.iterations <= 2);
  CHECK(r.residual < 1e-9);
  CHECK(pose_difference(r.pose, Pose()) < 1e-9);
  CHECK(r.converged);
}

TEST_CASE("icp recovers a cropped, perturbed object") {
  Rng rng(6);
  const TriangleMesh object = registration_object();
  const PointCloud target = sample_points_on_mesh(object, 5000, rng);
  PointCloud source = crop_fraction(sample_points_on_mesh(object, 5000, rng), 0.6, rng);
  add_noise(source, 0.001, rng);
  const Pose perturb = Pose::from_axis_angle(Eigen::Vector3d(1, 2, 3).normalized(), 10 * kDeg, {0.03, 0, 0});
  const PointCloud moved = source.transformed(perturb);
  const AlignmentResult r = icp_point_to_plane(moved, target, Pose());
  const Pose expect = perturb.inverse();
  CHECK(rotation_distance(r.pose, expect) < 0.5 * kDeg);
  CHECK(translation_distance(r.pose, expect) < 0.002);
  for (std::size_t i = 1; i < r.residual_history.size(); ++i) {
    CHECK(r.residual_history[i] <= r.residual_history[i - 1]);
  }
  CHECK(r.residual == doctest::Approx(r.residual_history.back()));
}

TEST_CASE("icp residual never increases over accepted iterations") {
  Rng rng(7);
  const TriangleMesh object = registration_object();
  const PointCloud target = sample_points_on_mesh(object, 3000, rng);
  for (int trial = 0; trial < 20; ++trial) {
    PointCloud source = crop_fraction(sample_points_on_mesh(object, 2000, rng), 0.7, rng);
    add_noise(source, 0.002, rng);
    const AlignmentResult r =
        icp_point_to_plane(source.transformed(random_perturbation(rng, 20 * kDeg, 0.06)), target, Pose());
    REQUIRE(r.residual_history.size() == static_cast<std::size_t>(r.iterations) + 1);
    for (std::size_t i = 1; i < r.residual_history.size(); ++i) {
      CHECK(r.residual_history[i] <= r.residual_history[i - 1]);
    }
    CHECK(r.iterations <= IcpParams{}.max_iterations);
  }
}

TEST_CASE("icp solves a planar offset along the normal in one step") {
  Rng rng(8);
  TriangleMesh plane = make_grid(10, 10, 1.0, 1.0);
  const PointCloud target = sample_points_on_mesh(plane, 4000, rng);
  PointCloud source = sample_points_on_mesh(plane, 2000, rng);
  source = source.transformed(Pose::from_translation({0, 0, 0.005}));
  const AlignmentResult r = icp_point_to_plane(source, target, Pose());
  CHECK(r.iterations <= 3);
  CHECK(std::abs(r.pose.translation.z() + 0.005) < 1e-9);
  CHECK(rotation_distance(r.pose, Pose()) < 1e-9);
}

TEST_CASE("icp reports missing correspondences with the init pose") {
  Rng rng(9);
  const PointCloud target = sample_points_on_mesh(registration_object(), 500, rng);
  const Pose init = Pose::from_translation({5, 0, 0});
  try {
    icp_point_to_plane(target, target, init);
    FAIL("expected IcpError");
  } catch (const IcpError& e) {
    CHECK(e.category() == ErrorCategory::convergence);
    CHECK(pose_difference(e.init(), init) == 0.0);
  }
}

TEST_CASE("icp validates its inputs") {
  Rng rng(10);
  const PointCloud target = sample_points_on_mesh(registration_object(), 100, rng);
  PointCloud bare = target;
  bare.normals.clear();
  CHECK_THROWS_AS(icp_point_to_plane(target, bare, Pose()), Error);
  CHECK_THROWS_AS(icp_point_to_plane(PointCloud{}, target, Pose()), Error);
  IcpParams bad;
  bad.trim_fraction = 0.6;
  CHECK_THROWS_AS(icp_point_to_plane(target, target, Pose(), bad), Error);
  bad = IcpParams{};
  bad.max_correspondence_distance = 0;
  CHECK_THROWS_AS(icp_point_to_plane(target, target, Pose(), bad), Error);
}

TEST_CASE("icp works with estimated target normals") {
  Rng rng(11);
  const TriangleMesh object = registration_object();
  PointCloud target = sample_points_on_mesh(object, 5000, rng);
  target = estimate_normals(PointCloud{target.points, {}}, 12, Eigen::Vector3d(0, 0, 5));
  PointCloud source = crop_fraction(sample_points_on_mesh(object, 5000, rng), 0.6, rng);
  const Pose perturb = Pose::from_axis_angle(Eigen::Vector3d(0, 1, 1).normalized(), 8 * kDeg, {0, 0.02, 0.01});
  const AlignmentResult r = icp_point_to_plane(source.transformed(perturb), target, Pose());
  CHECK(rotation_distance(r.pose, perturb.inverse()) < 0.5 * kDeg);
  CHECK(translation_distance(r.pose, perturb.inverse()) < 0.002);
}

TEST_CASE("align_scene is self-consistent on its own rendering") {
  Scene scene = alignment_scene(1);
  const DepthImage depth = observe(scene, Pose());
  const SceneAlignment a = align_scene(scene, depth, scene.camera("observer"), marker_pairs(Pose()));
  CHECK(translation_distance(a.pose, Pose()) < 0.001);
  CHECK(rotation_distance(a.pose, Pose()) < 0.1 * kDeg);
  CHECK(pose_difference(scene.background.local_to_world, a.pose) == 0.0);
}

TEST_CASE("align_scene recovers a perturbed background") {
  Rng rng(12);
  for (int trial = 0; trial < 3; ++trial) {
    Scene scene = alignment_scene(2 + trial);
    const Pose truth =
        Pose::from_axis_angle(rng.unit_vector(), 5 * kDeg, 0.02 * rng.unit_vector());
    const DepthImage depth = observe(scene, truth);
    // Marker taken at the nominal placement; ICP must close the gap.
    const SceneAlignment a = align_scene(scene, depth, scene.camera("observer"), marker_pairs(Pose()));
    MESSAGE("trial " << trial << ": " << rotation_distance(a.pose, truth) / kDeg << " deg, "
                     << translation_distance(a.pose, truth) * 1000 << " mm, " << a.icp.iterations << " iterations");
    CHECK(rotation_distance(a.pose, truth) < 0.5 * kDeg);
    CHECK(translation_distance(a.pose, truth) < 0.002);

    // A second pass on a fresh observation of the aligned scene barely moves it.
    const DepthImage again = observe(scene, scene.background.local_to_world);
    const Pose first = a.pose;
    const SceneAlignment b = align_scene(scene, again, scene.camera("observer"), marker_pairs(first));
    CHECK(rotation_distance(b.pose, first) < 0.1 * kDeg);
    CHECK(translation_distance(b.pose, first) < 0.001);
  }
}

TEST_CASE("align_scene without icp keeps the marker pose") {
  Scene scene = alignment_scene(1, 1000);
  Rng rng(13);
  const Pose truth = random_pose(rng, 0.5);
  SceneAlignmentOptions opts;
  opts.use_icp = false;
  const SceneAlignment a = align_scene(scene, DepthImage(4, 4), scene.camera("observer"), marker_pairs(truth), opts);
  CHECK(pose_difference(a.pose, estimate_pose_kabsch(marker_pairs(truth))) == 0.0);
  CHECK(pose_difference(a.pose, a.coarse) == 0.0);
  CHECK(a.icp.iterations == 0);

  Scene bare = scene;
  bare.background_mesh = TriangleMesh{};
  CHECK_THROWS_AS(align_scene(bare, DepthImage(4, 4), scene.camera("observer"), marker_pairs(truth), opts), Error);
}

TEST_CASE("correspondence files round trip and report bad lines") {
  TempDir dir("align");
  Rng rng(14);
  CorrespondenceSet c = marker_pairs(random_pose(rng));
  write_correspondences(c, dir.file("m.txt"));
  const CorrespondenceSet back = read_correspondences(dir.file("m.txt"));
  REQUIRE(back.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(back.source[i] == c.source[i]);
    CHECK(back.target[i] == c.target[i]);
  }
  {
    std::ofstream out(dir.file("bad.txt"));
    out << "# header\n0 0 0 1 1 1\n\n0 0 0 1 1\n";
  }
  try {
    read_correspondences(dir.file("bad.txt"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.location() == 4);
    CHECK(e.unit() == ParseError::Unit::line);
  }
  CHECK_THROWS_AS(read_correspondences(dir.file("missing.txt")), Error);
}
