#include <cmath>
#include <fstream>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "splatsim/core/camera.hpp"
#include "splatsim/core/error.hpp"
#include "splatsim/core/gaussian.hpp"
#include "splatsim/core/image_io.hpp"
#include "splatsim/core/json_util.hpp"
#include "splatsim/core/manifest.hpp"
#include "splatsim/core/mesh_io.hpp"
#include "splatsim/core/mesh_shapes.hpp"
#include "splatsim/core/ply.hpp"
#include "splatsim/core/pose.hpp"
#include "splatsim/core/rng.hpp"
#include "splatsim/core/splat_io.hpp"
#include "test_util.hpp"

using namespace splatsim;
using splatsim::testing::pose_difference;
using splatsim::testing::random_pose;
using splatsim::testing::TempDir;

namespace {

// Homogeneous matrix built without the Pose class.
Eigen::Matrix4d rz_matrix(double angle, const Eigen::Vector3d& t) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(0, 0) = std::cos(angle);
  m(0, 1) = -std::sin(angle);
  m(1, 0) = std::sin(angle);
  m(1, 1) = std::cos(angle);
  m.block<3, 1>(0, 3) = t;
  return m;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

ply::Property scalar(const std::string& name, std::vector<double> values) {
  ply::Property p;
  p.name = name;
  p.type = ply::Type::float32;
  p.values = std::move(values);
  return p;
}

// One-point splat file with the given raw (stored) opacity and log-scale.
void write_raw_splat(const std::string& path, double raw_opacity, double raw_scale, bool drop_opacity = false) {
  ply::File file;
  ply::Element v;
  v.name = "vertex";
  v.count = 1;
  for (const char* n : {"x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2"}) v.properties.push_back(scalar(n, {0.0}));
  if (!drop_opacity) v.properties.push_back(scalar("opacity", {raw_opacity}));
  for (const char* n : {"scale_0", "scale_1", "scale_2"}) v.properties.push_back(scalar(n, {raw_scale}));
  v.properties.push_back(scalar("rot_0", {1.0}));
  for (const char* n : {"rot_1", "rot_2", "rot_3"}) v.properties.push_back(scalar(n, {0.0}));
  file.elements.push_back(v);
  ply::write(file, path);
}

constexpr const char* kCubeObj = R"(# unit cube
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 3 2
f 1 4 3
f 5 6 7
f 5 7 8
f 1 2 6
f 1 6 5
f 2 3 7
f 2 7 6
f 3 4 8
f 3 8 7
f 4 1 5
f 4 5 8
)";

}  // namespace

TEST_CASE("pose compose with identity is neutral") {
  Rng rng(1);
  const Pose p = random_pose(rng);
  CHECK(pose_difference(compose(Pose::identity(), p), p) < 1e-15);
  CHECK(pose_difference(compose(p, Pose::identity()), p) < 1e-15);
}

TEST_CASE("pose compose of two z rotations matches the homogeneous matrix product") {
  const Pose a = Pose::from_axis_angle(Eigen::Vector3d::UnitZ(), std::numbers::pi / 2, {1, 0, 0});
  const Pose b = Pose::from_axis_angle(Eigen::Vector3d::UnitZ(), std::numbers::pi / 2);
  const Eigen::Matrix4d oracle = rz_matrix(std::numbers::pi / 2, {1, 0, 0}) * rz_matrix(std::numbers::pi / 2, {0, 0, 0});
  const Pose c = compose(a, b);
  CHECK((c.matrix() - oracle).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((c.matrix() - rz_matrix(std::numbers::pi, {1, 0, 0})).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pose group laws hold over 10k random poses") {
  Rng rng(42);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Pose a = random_pose(rng), b = random_pose(rng), c = random_pose(rng);
    worst = std::max(worst, pose_difference(compose(compose(a, b), c), compose(a, compose(b, c))));
    worst = std::max(worst, pose_difference(compose(a, a.inverse()), Pose::identity()));
    worst = std::max(worst, pose_difference(compose(a.inverse(), a), Pose::identity()));
    worst = std::max(worst, pose_difference(compose(Pose::identity(), a), a));
    CHECK(is_unit_quaternion(compose(a, b).rotation));
    // Matrix representation is a homomorphism.
    worst = std::max(worst, (compose(a, b).matrix() - a.matrix() * b.matrix()).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("rotation vector exponential and rotation_error are inverse") {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    Eigen::Vector3d w = rng.unit_vector() * rng.uniform(0.0, 3.0);
    const Eigen::Quaterniond from = testing::random_rotation(rng);
    const Eigen::Quaterniond to = quaternion_from_rotation_vector(w) * from;
    CHECK((rotation_error(from, to) - w).norm() < 1e-9);
  }
}

TEST_CASE("covariance is symmetric with eigenvalues bounded by the smallest scale") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    GaussianPrimitive g;
    g.rotation = testing::random_rotation(rng);
    g.scale = {std::exp(rng.uniform(-6, 0)), std::exp(rng.uniform(-6, 0)), std::exp(rng.uniform(-6, 0))};
    const Eigen::Matrix3d cov = g.covariance();
    CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    const double smin = g.scale.minCoeff();
    CHECK(eig.eigenvalues().minCoeff() >= smin * smin * (1.0 - 1e-6));
  }
}

TEST_CASE("gaussian validation rejects bad parameters") {
  GaussianPrimitive g;
  CHECK_NOTHROW(g.validate());
  g.opacity = 1.0;
  CHECK_THROWS_AS(g.validate(), Error);
  g.opacity = 0.5;
  g.scale.x() = 0.0;
  CHECK_THROWS_AS(g.validate(), Error);
}

TEST_CASE("splat loading maps stored opacity and scale") {
  TempDir dir("splat");
  const std::string path = dir.file("one.ply");
  write_raw_splat(path, 0.0, 0.0);
  const GaussianCloud cloud = load_gaussian_cloud(path);
  REQUIRE(cloud.size() == 1);
  CHECK(cloud.primitives[0].opacity == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cloud.primitives[0].scale.x() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cloud.primitives[0].color.x() == doctest::Approx(0.5));
}

TEST_CASE("splat loading reports missing attributes and non-finite values") {
  TempDir dir("splat_bad");
  write_raw_splat(dir.file("missing.ply"), 0.0, 0.0, true);
  CHECK_THROWS_WITH_AS(load_gaussian_cloud(dir.file("missing.ply")), doctest::Contains("opacity"), Error);
  write_raw_splat(dir.file("nan.ply"), std::nan(""), 0.0);
  CHECK_THROWS_WITH_AS(load_gaussian_cloud(dir.file("nan.ply")), doctest::Contains("non-finite"), Error);
}

TEST_CASE("splat save then load preserves every field") {
  TempDir dir("splat_rt");
  Rng rng(11);
  GaussianCloud cloud;
  for (int i = 0; i < 500; ++i) {
    GaussianPrimitive g;
    g.mean = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    g.rotation = testing::random_rotation(rng);
    if (g.rotation.w() < 0) g.rotation.coeffs() *= -1.0;
    g.scale = {rng.uniform(0.001, 0.1), rng.uniform(0.001, 0.1), rng.uniform(0.001, 0.1)};
    g.opacity = rng.uniform(0.01, 0.99);
    g.color = {rng.uniform(), rng.uniform(), rng.uniform()};
    cloud.primitives.push_back(g);
  }
  save_gaussian_cloud(cloud, dir.file("rt.ply"));
  const GaussianCloud back = load_gaussian_cloud(dir.file("rt.ply"));
  REQUIRE(back.size() == cloud.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto &a = cloud.primitives[i], &b = back.primitives[i];
    worst = std::max(worst, (a.mean - b.mean).cwiseAbs().maxCoeff());
    worst = std::max(worst, (a.rotation.coeffs() - b.rotation.coeffs()).cwiseAbs().maxCoeff());
    worst = std::max(worst, (a.scale - b.scale).cwiseAbs().maxCoeff());
    worst = std::max(worst, std::abs(a.opacity - b.opacity));
    worst = std::max(worst, (a.color - b.color).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("unit cube OBJ loads with 12 faces") {
  TempDir dir("cube");
  write_text(dir.file("cube.obj"), kCubeObj);
  const MeshLoadResult r = load_mesh(dir.file("cube.obj"));
  CHECK(r.mesh.vertices.size() == 8);
  CHECK(r.mesh.faces.size() == 12);
  CHECK(r.dropped_degenerate_faces == 0);
  CHECK(is_watertight(r.mesh));
  CHECK(euler_characteristic(r.mesh) == 2);
  CHECK(r.mesh.surface_area() == doctest::Approx(6.0));
}

TEST_CASE("OBJ with an out-of-range index is a parse error naming the line") {
  TempDir dir("badobj");
  write_text(dir.file("bad.obj"), "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\nf 1 2 9\n");
  try {
    load_mesh(dir.file("bad.obj"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.unit() == ParseError::Unit::line);
    CHECK(e.location() == 5);
    CHECK(e.category() == ErrorCategory::parse);
  }
}

TEST_CASE("degenerate faces are dropped and counted") {
  TempDir dir("degen");
  write_text(dir.file("d.obj"), "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 2 0 0\nf 1 2 3\nf 1 1 2\nf 1 2 4\n");
  const MeshLoadResult r = load_mesh(dir.file("d.obj"));
  CHECK(r.mesh.faces.size() == 1);
  CHECK(r.dropped_degenerate_faces == 2);
}

TEST_CASE("OBJ polygons are fan-triangulated and negative indices resolve") {
  TempDir dir("poly");
  write_text(dir.file("q.obj"), "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf -4/1/1 -3 -2 -1\n");
  const MeshLoadResult r = load_mesh(dir.file("q.obj"));
  CHECK(r.mesh.faces.size() == 2);
}

TEST_CASE("mesh round trips through every writer") {
  TempDir dir("mesh_rt");
  Rng rng(5);
  TriangleMesh mesh = make_uv_sphere(0.37, 9, 13);
  for (auto& v : mesh.vertices) v += Eigen::Vector3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)) * 1e-3;
  paint(mesh, {0.2, 0.4, 0.8});
  for (const auto& [name, format] : {std::pair{"m.obj", MeshFormat::obj}, std::pair{"a.ply", MeshFormat::ply_ascii},
                                     std::pair{"b.ply", MeshFormat::ply_binary}}) {
    save_mesh(mesh, dir.file(name), format);
    const TriangleMesh back = load_mesh(dir.file(name)).mesh;
    REQUIRE(back.vertices.size() == mesh.vertices.size());
    REQUIRE(back.faces == mesh.faces);
    double worst = 0.0;
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      worst = std::max(worst, (back.vertices[i] - mesh.vertices[i]).cwiseAbs().maxCoeff());
    }
    CHECK_MESSAGE(worst < 1e-6, name);
    REQUIRE(back.has_colors());
    CHECK((back.colors[0] - mesh.colors[0]).cwiseAbs().maxCoeff() < 1.0 / 255.0);
  }
}

TEST_CASE("PLY reader reports truncated binary payloads by byte offset") {
  TempDir dir("trunc");
  save_mesh(make_box({1, 1, 1}), dir.file("box.ply"), MeshFormat::ply_binary);
  Bytes bytes = read_bytes(dir.file("box.ply"));
  bytes.resize(bytes.size() - 7);
  write_bytes(bytes, dir.file("cut.ply"));
  try {
    load_mesh(dir.file("cut.ply"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.unit() == ParseError::Unit::byte);
  }
}

TEST_CASE("primitive shapes are closed and outward oriented") {
  const std::vector<TriangleMesh> shapes{make_box({0.1, 0.2, 0.3}), make_subdivided_box({1, 1, 1}, 8),
                                         make_cylinder(0.2, 0.5, 16), make_uv_sphere(0.5, 12, 16), make_icosphere(0.3, 2),
                                         make_capsule({0, 0, 0}, {0.3, 0.1, 0.2}, 0.05)};
  for (const auto& m : shapes) {
    CHECK(is_watertight(m));
    CHECK(euler_characteristic(m) == 2);
    // Divergence theorem: positive enclosed volume for outward faces.
    double volume = 0.0;
    for (const Face& f : m.faces) {
      volume += m.vertices[f[0]].dot(m.vertices[f[1]].cross(m.vertices[f[2]])) / 6.0;
    }
    CHECK(volume > 0.0);
  }
  CHECK(make_subdivided_box({1, 1, 1}, 8).faces.size() == 768);
}

TEST_CASE("camera projection and unprojection are inverse") {
  CameraView cam = CameraView::look_at({1, -0.5, 0.8}, {0, 0, 0}, {0, 0, 1}, 64, 48, 60.0);
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d p(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3));
    const auto uvz = cam.project(p);
    REQUIRE(uvz.has_value());
    const Eigen::Vector3d back = cam.camera_to_world().apply(cam.unproject(uvz->x(), uvz->y(), uvz->z()));
    CHECK((back - p).norm() < 1e-9);
  }
  CameraView principal;
  principal.fx = principal.fy = 100;
  principal.cx = principal.cy = 50;
  principal.width = principal.height = 100;
  const auto c = principal.project({0, 0, 1});
  CHECK(c->x() == doctest::Approx(50));
  CHECK(c->y() == doctest::Approx(50));
  CHECK_FALSE(principal.project({0, 0, -1}).has_value());
}

TEST_CASE("PNG round trip is lossless and JPEG truncation is an error") {
  TempDir dir("img");
  Image8 img(37, 23);
  Rng rng(1);
  for (auto& b : img.data) b = static_cast<std::uint8_t>(rng.below(256));
  write_image(img, dir.file("a.png"));
  CHECK(read_image(dir.file("a.png")) == img);

  const Bytes jpeg = encode_jpeg(img, 40);
  const Image8 decoded = decode_jpeg(jpeg, "frame");
  CHECK(decoded.same_size(img));
  Bytes cut(jpeg.begin(), jpeg.begin() + static_cast<long>(jpeg.size() / 2));
  CHECK_THROWS_WITH_AS(decode_jpeg(cut, "cam/3"), doctest::Contains("cam/3"), Error);
}

TEST_CASE("depth raster round trip") {
  TempDir dir("depth");
  DepthImage d(5, 4);
  d.at(1, 2) = 0.75f;
  d.at(4, 3) = 2.5f;
  write_depth(d, dir.file("d.depth"));
  const DepthImage back = read_depth(dir.file("d.depth"));
  CHECK(back.width == 5);
  CHECK(back.depth == d.depth);
}

TEST_CASE("manifest round trip and scene loading") {
  TempDir dir("manifest");
  GaussianCloud bg;
  bg.primitives.resize(3);
  save_gaussian_cloud(bg, dir.file("bg.ply"));
  save_mesh(make_box({1, 1, 0.1}), dir.file("table.obj"));
  save_mesh(make_box({0.04, 0.06, 0.05}), dir.file("block.obj"));

  SceneManifest m;
  m.splats = "bg.ply";
  m.background_mesh = "table.obj";
  m.background_pose = Pose::from_axis_angle({0, 0, 1}, 0.1, {0.01, 0.02, 0.0});
  m.objects.push_back({"block", "block.obj", "", Pose::from_translation({0.5, 0, 0.025}), true});
  CameraView cam = CameraView::look_at({1, 0, 1}, {0, 0, 0}, {0, 0, 1}, 64, 48, 50);
  m.cameras["third"] = cam;
  m.cameras["wrist"] = cam;
  m.camera_mounts["wrist"] = CameraMount{"flange", Pose::from_translation({0, 0, 0.05})};
  m.table_height = 0.0;
  save_manifest(m, dir.file("scene.json"));

  const SceneManifest back = load_manifest(dir.file("scene.json"));
  CHECK(back.objects.size() == 1);
  CHECK(pose_difference(back.background_pose, m.background_pose) < 1e-12);
  CHECK(back.camera_mounts.at("wrist").frame == "flange");

  const Scene scene = load_scene(dir.file("scene.json"));
  CHECK(scene.background.size() == 3);
  CHECK(scene.objects[0].extents.isApprox(Eigen::Vector3d(0.04, 0.06, 0.05), 1e-9));
  CHECK(scene.camera("third").width == 64);
  CHECK_THROWS_AS(scene.camera("nope"), Error);
  try {
    scene.camera("nope");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::not_found);
  }
}

TEST_CASE("malformed manifest JSON is a parse error") {
  TempDir dir("badjson");
  write_text(dir.file("s.json"), "{\"background\": ");
  CHECK_THROWS_AS(load_manifest(dir.file("s.json")), ParseError);
}

TEST_CASE("derived seeds are deterministic and distinct") {
  CHECK(derive_seed(7, 3, 0) == derive_seed(7, 3, 0));
  CHECK(derive_seed(7, 3, 0) != derive_seed(7, 3, 1));
  CHECK(derive_seed(7, 3, 0) != derive_seed(7, 4, 0));
  CHECK(derive_seed(7, 3, 0) != derive_seed(8, 3, 0));
  Rng a(derive_seed(1, 2)), b(derive_seed(1, 2));
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
}
