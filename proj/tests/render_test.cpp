#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "render_oracle.hpp"
#include "splatsim/core/error.hpp"
#include "splatsim/core/mesh_shapes.hpp"
#include "splatsim/render/compositor.hpp"
#include "splatsim/render/gaussian_rasterizer.hpp"
#include "splatsim/render/mesh_rasterizer.hpp"
#include "test_util.hpp"

using namespace splatsim;
using splatsim::testing::OracleScene;

namespace {

CameraView front_camera(int w = 32, int h = 32, double f = 40.0) {
  CameraView cam;
  cam.fx = cam.fy = f;
  cam.cx = (w - 1) / 2.0;
  cam.cy = (h - 1) / 2.0;
  cam.width = w;
  cam.height = h;
  return cam;
}

RenderBuffers composite_scene(const OracleScene& s) {
  const RenderBuffers mesh = rasterize_mesh(s.cam, {MeshInstance{&s.mesh, Pose()}});
  return composite(s.cam, s.cloud, mesh, s.background);
}

// Pixel map of a world point through `cam` as a plain function of the point.
Eigen::Vector2d pixel_of(const CameraView& cam, const Eigen::Vector3d& world) {
  return cam.project_camera(cam.to_camera(world));
}

}  // namespace

TEST_CASE("principal ray projects to the principal point") {
  CameraView cam = front_camera(64, 48, 50.0);
  GaussianPrimitive g;
  g.mean = {0, 0, 2};
  g.scale = Eigen::Vector3d::Constant(0.02);
  const auto p = project_gaussian(cam, g);
  REQUIRE(p);
  CHECK(p->mean.x() == doctest::Approx(cam.cx));
  CHECK(p->mean.y() == doctest::Approx(cam.cy));
  CHECK(p->depth == doctest::Approx(2.0));
  // Isotropic Gaussian on the axis: (f s / z)^2 I + 0.3 I.
  const double expect = std::pow(50.0 * 0.02 / 2.0, 2) + kLowPassVariance;
  CHECK(p->covariance(0, 0) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(p->covariance(1, 1) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(std::abs(p->covariance(0, 1)) < 1e-12);
  CHECK((p->covariance * p->inverse_covariance - Eigen::Matrix2d::Identity()).norm() < 1e-12);
}

TEST_CASE("gaussians behind the near plane are culled") {
  CameraView cam = front_camera();
  GaussianPrimitive g;
  g.mean = {0, 0, cam.near * 0.5};
  CHECK_FALSE(project_gaussian(cam, g));
  g.mean = {0, 0, -1};
  CHECK_FALSE(project_gaussian(cam, g));
}

TEST_CASE("projection jacobian matches central differences") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Vector3d eye(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Eigen::Vector3d target = eye + 2.0 * rng.unit_vector();
    const CameraView cam = CameraView::look_at(eye, target, {0, 0, 1}, 640, 480, rng.uniform(30, 90));
    const Eigen::Vector3d pc(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(0.5, 4.0));
    const Eigen::Matrix<double, 2, 3> j = projection_jacobian(cam, pc);
    // Camera-space map.
    const double h = 1e-6;
    Eigen::Matrix<double, 2, 3> fd;
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector3d dp = Eigen::Vector3d::Zero();
      dp[k] = h;
      fd.col(k) = (cam.project_camera(pc + dp) - cam.project_camera(pc - dp)) / (2 * h);
    }
    CHECK((j - fd).norm() / fd.norm() < 1e-4);
    // World-space map: J W.
    const Eigen::Vector3d pw = cam.camera_to_world().apply(pc);
    const Eigen::Matrix<double, 2, 3> jw = j * cam.world_to_camera.rotation_matrix();
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector3d dp = Eigen::Vector3d::Zero();
      dp[k] = h;
      fd.col(k) = (pixel_of(cam, pw + dp) - pixel_of(cam, pw - dp)) / (2 * h);
    }
    CHECK((jw - fd).norm() / fd.norm() < 1e-4);
  }
}

TEST_CASE("projected covariance matches the explicit formula") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const OracleScene s = testing::random_oracle_scene(seed, 32, 0);
    const Eigen::Matrix3d w = s.cam.world_to_camera.rotation_matrix();
    for (const auto& g : s.cloud.primitives) {
      const auto p = project_gaussian(s.cam, g);
      REQUIRE(p);
      const Eigen::Matrix2d expect = testing::oracle_covariance_2d(s.cam, g, s.cam.to_camera(g.mean), w);
      CHECK((p->covariance - expect).norm() <= 1e-9 * expect.norm());
    }
  }
}

TEST_CASE("empty cloud renders the background") {
  const CameraView cam = front_camera(8, 6);
  const RenderBuffers out = render_gaussians(cam, GaussianCloud{}, {0.1, 0.2, 0.3});
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 8; ++x) {
      CHECK(out.color_at(x, y).isApprox(Eigen::Vector3d(0.1, 0.2, 0.3)));
      CHECK(out.alpha[out.index(x, y)] == 0.0);
      CHECK(std::isinf(out.depth[out.index(x, y)]));
    }
  }
}

TEST_CASE("two coincident wide splats blend front to back") {
  const CameraView cam = front_camera(4, 4);
  GaussianCloud cloud;
  GaussianPrimitive front, back;
  front.mean = {0, 0, 1};
  back.mean = {0, 0, 2};
  front.scale = back.scale = Eigen::Vector3d::Constant(1e3);  // alpha == opacity to ~1e-10
  front.opacity = back.opacity = 0.5;
  front.color = {1, 0, 0};
  back.color = {0, 1, 0};
  cloud.primitives = {back, front};
  const RenderBuffers out = render_gaussians(cam, cloud);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      CHECK((out.color_at(x, y) - Eigen::Vector3d(0.5, 0.25, 0)).cwiseAbs().maxCoeff() < 1e-6);
      CHECK(out.alpha[out.index(x, y)] == doctest::Approx(0.75).epsilon(1e-6));
      // Expected depth (0.5*1 + 0.25*2) / 0.75.
      CHECK(out.depth[out.index(x, y)] == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("splat render matches the per-pixel oracle") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    OracleScene s = testing::random_oracle_scene(seed, 32, 0);
    const RenderBuffers got = render_gaussians(s.cam, s.cloud, s.background);
    const RenderBuffers want = testing::oracle_render(s);
    CHECK_MESSAGE(testing::max_color_alpha_error(got, want) <= 1e-5, "seed " << seed);
    CHECK_MESSAGE(testing::max_depth_error(got, want) <= 1e-6, "seed " << seed);
  }
}

TEST_CASE("triangle coverage follows the pixel-center half-plane test") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const CameraView cam = front_camera(24, 20, 30.0);
    TriangleMesh mesh;
    const double z = rng.uniform(1.0, 3.0);
    for (int k = 0; k < 3; ++k) {
      mesh.vertices.push_back(cam.unproject(rng.uniform(-4, 28), rng.uniform(-4, 24), z));
    }
    mesh.faces.push_back({0, 1, 2});
    const RenderBuffers out = rasterize_mesh(cam, {MeshInstance{&mesh, Pose()}});
    Eigen::Vector2d p[3];
    for (int k = 0; k < 3; ++k) p[k] = cam.project_camera(mesh.vertices[k]);
    const double area = (p[1] - p[0]).x() * (p[2] - p[0]).y() - (p[1] - p[0]).y() * (p[2] - p[0]).x();
    if (std::abs(area) < 1e-3) continue;
    for (int y = 0; y < cam.height; ++y) {
      for (int x = 0; x < cam.width; ++x) {
        double e[3];
        bool near_edge = false;
        for (int k = 0; k < 3; ++k) {
          const Eigen::Vector2d a = p[k], b = p[(k + 1) % 3];
          e[k] = ((b - a).x() * (y - a.y()) - (b - a).y() * (x - a.x())) / (area > 0 ? 1.0 : -1.0);
          near_edge = near_edge || std::abs(e[k]) < 1e-6 * (b - a).norm();
        }
        if (near_edge) continue;
        const bool inside = e[0] > 0 && e[1] > 0 && e[2] > 0;
        const std::size_t i = out.index(x, y);
        CHECK(inside == (out.alpha[i] == 1.0));
        if (inside) CHECK(out.depth[i] == doctest::Approx(z).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("nearer triangle wins the depth test regardless of draw order") {
  const CameraView cam = front_camera(16, 16, 20.0);
  TriangleMesh near_tri, far_tri;
  near_tri.vertices = {cam.unproject(-10, -10, 1), cam.unproject(40, -10, 1), cam.unproject(-10, 40, 1)};
  near_tri.faces = {{0, 1, 2}};
  near_tri.colors = {{1, 0, 0}, {1, 0, 0}, {1, 0, 0}};
  far_tri = near_tri;
  for (auto& v : far_tri.vertices) v *= 2.0;
  far_tri.colors = {{0, 0, 1}, {0, 0, 1}, {0, 0, 1}};
  for (int order = 0; order < 2; ++order) {
    std::vector<MeshInstance> inst{{&near_tri, Pose()}, {&far_tri, Pose()}};
    if (order) std::swap(inst[0], inst[1]);
    const RenderBuffers out = rasterize_mesh(cam, inst);
    CHECK(out.depth[out.index(3, 3)] == doctest::Approx(1.0));
    CHECK(out.color_at(3, 3).x() > 0);
    CHECK(out.color_at(3, 3).z() == 0);
  }
}

TEST_CASE("mesh clipped by the near plane keeps its visible part") {
  const CameraView cam = front_camera(16, 16, 20.0);
  TriangleMesh tri;
  // Straddles the near plane along the view axis.
  tri.vertices = {{-1, -1, -0.5}, {1, -1, -0.5}, {0, 1, 3.0}};
  tri.faces = {{0, 1, 2}};
  const RenderBuffers out = rasterize_mesh(cam, {MeshInstance{&tri, Pose()}});
  std::size_t covered = 0;
  for (std::size_t i = 0; i < out.alpha.size(); ++i) {
    if (out.alpha[i] > 0) {
      ++covered;
      CHECK(out.depth[i] >= cam.near - 1e-12);
    }
  }
  CHECK(covered > 0);
}

TEST_CASE("mesh in front of a splat hides it") {
  const CameraView cam = front_camera(8, 8, 10.0);
  TriangleMesh wall;
  wall.vertices = {cam.unproject(-20, -20, 0.5), cam.unproject(40, -20, 0.5), cam.unproject(-20, 40, 0.5)};
  wall.faces = {{0, 1, 2}};
  wall.colors.assign(3, Eigen::Vector3d(0.2, 0.4, 0.6));
  GaussianCloud cloud;
  GaussianPrimitive g;
  g.mean = {0, 0, 1};
  g.scale = Eigen::Vector3d::Constant(1.0);
  g.opacity = 0.9;
  g.color = {1, 1, 1};
  cloud.primitives = {g};
  const RenderBuffers mesh = rasterize_mesh(cam, {MeshInstance{&wall, Pose()}});
  const RenderBuffers out = composite(cam, cloud, mesh, {0, 0, 0});
  const Eigen::Vector3d expect = shade({0.2, 0.4, 0.6}, wall.face_normal(0));
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      CHECK((out.color_at(x, y) - expect).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(out.alpha[out.index(x, y)] == 1.0);
      CHECK(out.depth[out.index(x, y)] == doctest::Approx(0.5));
    }
  }
}

TEST_CASE("composite without mesh equals the splat-only render") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const OracleScene s = testing::random_oracle_scene(seed, 32, 0);
    const RenderBuffers a = render_gaussians(s.cam, s.cloud, s.background);
    const RenderBuffers b = composite(s.cam, s.cloud, RenderBuffers(s.cam.width, s.cam.height), s.background);
    CHECK(a.color == b.color);
    CHECK(a.alpha == b.alpha);
    CHECK(a.depth == b.depth);
  }
}

TEST_CASE("composite rejects mismatched mesh buffers") {
  const CameraView cam = front_camera(8, 8);
  CHECK_THROWS_AS(composite(cam, GaussianCloud{}, RenderBuffers(4, 4)), Error);
}

TEST_CASE("hybrid composite matches the unified fragment-sort oracle") {
  std::size_t mesh_pixels = 0, blended_pixels = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const OracleScene s = testing::random_oracle_scene(seed);
    const RenderBuffers mesh = rasterize_mesh(s.cam, {MeshInstance{&s.mesh, Pose()}});
    const RenderBuffers got = composite(s.cam, s.cloud, mesh, s.background);
    const RenderBuffers want = testing::oracle_render(s);
    for (std::size_t i = 0; i < mesh.alpha.size(); ++i) {
      if (mesh.alpha[i] == 0.0) continue;
      ++mesh_pixels;
      if (got.depth[i] < mesh.depth[i]) ++blended_pixels;
    }
    const double err = testing::max_color_alpha_error(got, want);
    CHECK_MESSAGE(err <= 1e-5, "seed " << seed << " error " << err);
    CHECK_MESSAGE(testing::max_depth_error(got, want) <= 1e-6, "seed " << seed);
  }
  // The scenes exercise splats in front of mesh surfaces, not just one or the other.
  MESSAGE("mesh pixels " << mesh_pixels << ", with splats in front " << blended_pixels);
  CHECK(mesh_pixels > 10000);
  CHECK(blended_pixels > 1000);
}

TEST_CASE("splat render is invariant under primitive permutation") {
  Rng rng(3);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    OracleScene s = testing::random_oracle_scene(seed, 64, 4);
    const RenderBuffers a = composite_scene(s);
    for (std::size_t i = s.cloud.primitives.size(); i > 1; --i) {
      std::swap(s.cloud.primitives[i - 1], s.cloud.primitives[rng.below(i)]);
    }
    const RenderBuffers b = composite_scene(s);
    CHECK(a.color == b.color);
    CHECK(a.alpha == b.alpha);
    CHECK(a.depth == b.depth);
  }
}

TEST_CASE("coincident splats with different content still render order-independently") {
  const CameraView cam = front_camera(8, 8, 10.0);
  GaussianPrimitive a, b;
  a.mean = b.mean = {0, 0, 1};
  a.scale = b.scale = Eigen::Vector3d::Constant(0.1);
  a.color = {1, 0, 0};
  b.color = {0, 0, 1};
  GaussianCloud ab, ba;
  ab.primitives = {a, b};
  ba.primitives = {b, a};
  CHECK(render_gaussians(cam, ab).color == render_gaussians(cam, ba).color);
}

TEST_CASE("rendering is translation equivariant") {
  Rng rng(9);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    OracleScene s = testing::random_oracle_scene(seed, 32, 0);
    const RenderBuffers a = render_gaussians(s.cam, s.cloud, s.background);
    const Eigen::Vector3d offset(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
    for (auto& g : s.cloud.primitives) g.mean += offset;
    Pose c2w = s.cam.camera_to_world();
    c2w.translation += offset;
    const CameraView moved = s.cam.with_camera_pose(c2w);
    const RenderBuffers b = render_gaussians(moved, s.cloud, s.background);
    CHECK(testing::max_color_alpha_error(a, b) <= 1e-6);
    CHECK(testing::max_depth_error(a, b) <= 1e-6);
  }
}

TEST_CASE("cloud local frame is applied") {
  const OracleScene s = testing::random_oracle_scene(77, 32, 0);
  Rng rng(1);
  const Pose local = testing::random_pose(rng, 0.2);
  GaussianCloud posed, baked;
  posed.local_to_world = local;
  for (const auto& g : s.cloud.primitives) {
    posed.primitives.push_back(g.transformed(local.inverse()));
    baked.primitives.push_back(g);
  }
  const RenderBuffers a = render_gaussians(s.cam, posed, s.background);
  const RenderBuffers b = render_gaussians(s.cam, baked, s.background);
  CHECK(testing::max_color_alpha_error(a, b) <= 1e-9);
}

TEST_CASE("accumulated alpha grows with added splats and stays within [0, 1]") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    OracleScene s = testing::random_oracle_scene(seed, 32, 0);
    // Sort front to back, then add one splat at a time.
    std::sort(s.cloud.primitives.begin(), s.cloud.primitives.end(),
              [&](const auto& l, const auto& r) { return s.cam.to_camera(l.mean).z() < s.cam.to_camera(r.mean).z(); });
    GaussianCloud prefix;
    std::vector<double> prev(s.cam.pixel_count(), 0.0);
    for (const auto& g : s.cloud.primitives) {
      prefix.primitives.push_back(g);
      const RenderBuffers out = render_gaussians(s.cam, prefix);
      for (std::size_t i = 0; i < prev.size(); ++i) {
        CHECK(out.alpha[i] >= prev[i] - 1e-15);
        CHECK(out.alpha[i] <= 1.0);
        prev[i] = out.alpha[i];
      }
    }
  }
}

TEST_CASE("rendering is deterministic") {
  const OracleScene s = testing::random_oracle_scene(123, 64, 8, 64);
  const RenderBuffers a = composite_scene(s);
  const RenderBuffers b = composite_scene(s);
  CHECK(a.color == b.color);
  CHECK(a.depth == b.depth);
}

TEST_CASE("render_scene renders objects and reports unknown cameras") {
  Scene scene;
  scene.cameras["top"] = CameraView::look_at({0, 0, 1.0}, {0, 0, 0}, {0, 1, 0}, 64, 48, 60.0);
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    GaussianPrimitive g;
    g.mean = {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), -0.01};
    g.scale = Eigen::Vector3d(0.05, 0.05, 0.002);
    g.opacity = 0.9;
    g.color = {rng.uniform(), rng.uniform(), rng.uniform()};
    scene.background.primitives.push_back(g);
  }
  const Pose box_pose(Eigen::Quaterniond(Eigen::AngleAxisd(0.3, Eigen::Vector3d::UnitZ())), {0.05, -0.02, 0.02});
  scene.objects.push_back(RigidObject::make("cube", make_box({0.04, 0.04, 0.04}), {}, box_pose, true));

  CHECK_THROWS_AS(render_scene(scene, "wrist"), Error);
  try {
    render_scene(scene, "wrist");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::not_found);
  }

  const RenderedView view = render_scene(scene, "top");
  CHECK(view.color.width == 64);
  CHECK(view.depth.height == 48);
  // Top face at z = 0.04 seen from z = 1 has depth 0.96.
  const auto px = scene.cameras["top"].project(box_pose.translation + Eigen::Vector3d(0, 0, 0.02));
  REQUIRE(px);
  const float d = view.depth.at(static_cast<int>(std::lround(px->x())), static_cast<int>(std::lround(px->y())));
  CHECK(std::abs(d - 0.96) < 2e-3);

  // Without objects only the background remains.
  Scene empty = scene;
  empty.objects.clear();
  const RenderBuffers bg = render_view(empty.camera("top"), empty);
  const RenderBuffers splats = render_gaussians(empty.camera("top"), empty.background);
  CHECK(bg.color == splats.color);
}
