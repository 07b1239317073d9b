#include "splatsim/demo/world.hpp"

#include <cmath>
#include <filesystem>

#include <fmt/format.h>

#include "splatsim/core/error.hpp"
#include "splatsim/core/manifest.hpp"
#include "splatsim/core/mesh_io.hpp"
#include "splatsim/core/mesh_shapes.hpp"
#include "splatsim/core/rng.hpp"
#include "splatsim/core/splat_io.hpp"
#include "splatsim/kinematics/chain_io.hpp"

namespace splatsim {

namespace {

using ColorFn = Eigen::Vector3d (*)(const Eigen::Vector3d&);

// Axis-aligned planar patch: origin corner, two spanning edge vectors.
struct Patch {
  Eigen::Vector3d origin;
  Eigen::Vector3d u;
  Eigen::Vector3d v;
  ColorFn color;
  double weight;  // share of the splat budget per square meter
};

Eigen::Vector3d wood(const Eigen::Vector3d& p) {
  const double grain = std::sin(38.0 * p.x() + 4.0 * std::sin(6.0 * p.y())) * 0.5 + 0.5;
  const double plank = std::fmod(std::floor((p.y() + 0.8) / 0.2), 2.0) == 0.0 ? 1.0 : 0.9;
  return Eigen::Vector3d(0.60, 0.43, 0.28) * plank * (0.85 + 0.25 * grain);
}

Eigen::Vector3d floor_tiles(const Eigen::Vector3d& p) {
  const bool odd = (static_cast<long>(std::floor(p.x() / 0.5)) + static_cast<long>(std::floor(p.y() / 0.5))) % 2 != 0;
  return odd ? Eigen::Vector3d(0.42, 0.42, 0.45) : Eigen::Vector3d(0.55, 0.55, 0.57);
}

Eigen::Vector3d wall_paint(const Eigen::Vector3d& p) {
  // A poster and a window frame break up the flat wall.
  if (p.y() > -0.6 && p.y() < 0.0 && p.z() > 0.35 && p.z() < 0.9) return {0.25, 0.45, 0.65};
  if (p.y() > 0.4 && p.y() < 1.1 && p.z() > 0.3 && p.z() < 1.0) {
    const bool frame = p.y() < 0.44 || p.y() > 1.06 || p.z() < 0.34 || p.z() > 0.96 || std::abs(p.y() - 0.75) < 0.02;
    return frame ? Eigen::Vector3d(0.95, 0.95, 0.95) : Eigen::Vector3d(0.7, 0.82, 0.92);
  }
  return {0.86, 0.83, 0.77};
}

Eigen::Vector3d side_wall(const Eigen::Vector3d& p) {
  return Eigen::Vector3d(0.78, 0.8, 0.74) * (0.92 + 0.08 * std::sin(3.0 * p.x()));
}

Eigen::Vector3d shelf_color(const Eigen::Vector3d& p) {
  return p.z() > 0.16 ? Eigen::Vector3d(0.3, 0.3, 0.32) : Eigen::Vector3d(0.58, 0.62, 0.66);
}

Eigen::Vector3d edge_color(const Eigen::Vector3d&) { return {0.42, 0.3, 0.2}; }

void splat_patch(const Patch& patch, std::size_t count, Rng& rng, GaussianCloud& cloud) {
  const double lu = patch.u.norm(), lv = patch.v.norm();
  const Eigen::Vector3d n = patch.u.cross(patch.v).normalized();
  // Rows and columns proportional to the sides keep splats near-isotropic.
  const double spacing = std::sqrt(lu * lv / static_cast<double>(std::max<std::size_t>(count, 1)));
  const int nu = std::max(1, static_cast<int>(std::round(lu / spacing)));
  const int nv = std::max(1, static_cast<int>(std::round(lv / spacing)));
  Eigen::Matrix3d r;
  r.col(0) = patch.u / lu;
  r.col(1) = n.cross(r.col(0));
  r.col(2) = n;
  const Eigen::Quaterniond q(r);
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const double a = (i + rng.uniform(0.15, 0.85)) / nu, b = (j + rng.uniform(0.15, 0.85)) / nv;
      GaussianPrimitive g;
      g.mean = patch.origin + a * patch.u + b * patch.v + n * rng.normal(0.0, 0.0005);
      g.rotation = q * Eigen::Quaterniond(Eigen::AngleAxisd(rng.uniform(0.0, M_PI), Eigen::Vector3d::UnitZ()));
      const double s = spacing * rng.uniform(0.5, 0.6);
      g.scale = Eigen::Vector3d(s * rng.uniform(0.8, 1.25), s * rng.uniform(0.8, 1.25), 0.0015);
      g.opacity = rng.uniform(0.92, 0.99);
      const Eigen::Vector3d c = patch.color(g.mean) + Eigen::Vector3d(rng.normal(0, 0.02), rng.normal(0, 0.02), rng.normal(0, 0.02));
      g.color = c.cwiseMax(0.0).cwiseMin(1.0);
      cloud.primitives.push_back(g);
    }
  }
}

// Five visible faces (all but the bottom) of an axis-aligned box.
std::vector<Patch> box_patches(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi, ColorFn color, double weight) {
  const Eigen::Vector3d d = hi - lo;
  const Eigen::Vector3d ex(d.x(), 0, 0), ey(0, d.y(), 0), ez(0, 0, d.z());
  return {{{lo.x(), lo.y(), hi.z()}, ex, ey, color, weight},
          {lo, ex, ez, color, weight},
          {{lo.x(), hi.y(), lo.z()}, ez, ex, color, weight},
          {lo, ez, ey, color, weight},
          {{hi.x(), lo.y(), lo.z()}, ey, ez, color, weight}};
}

TriangleMesh box_between(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi) {
  TriangleMesh m = make_box(hi - lo);
  for (auto& v : m.vertices) v += 0.5 * (lo + hi);
  return m;
}

}  // namespace

Scene build_world(const WorldOptions& options) {
  if (options.splat_count < 100) throw invalid_argument("world needs at least 100 splats");
  if (options.width < 1 || options.height < 1) throw invalid_argument("camera size must be positive");
  Rng rng(options.seed);

  const Eigen::Vector3d table_lo(-0.3, -0.8, -0.05), table_hi(1.0, 0.8, 0.0);
  const Eigen::Vector3d shelf_lo(-0.25, 0.55, 0.0), shelf_hi(-0.05, 0.75, 0.22);
  const double floor_z = -0.75;

  std::vector<Patch> patches = {
      {{table_lo.x(), table_lo.y(), 0.0}, {1.3, 0, 0}, {0, 1.6, 0}, wood, 6.0},
      {{table_hi.x(), table_lo.y(), table_lo.z()}, {0, 1.6, 0}, {0, 0, 0.05}, edge_color, 3.0},
      {{-0.8, -2.0, floor_z}, {3.2, 0, 0}, {0, 4.0, 0}, floor_tiles, 0.15},
      {{-0.8, -2.0, floor_z}, {0, 0, 2.0}, {0, 4.0, 0}, wall_paint, 1.0},
      {{-0.8, 1.6, floor_z}, {0, 0, 2.0}, {3.2, 0, 0}, side_wall, 0.5},
  };
  for (const Patch& p : box_patches(shelf_lo, shelf_hi, shelf_color, 4.0)) patches.push_back(p);

  double total = 0.0;
  for (const Patch& p : patches) total += p.weight * p.u.cross(p.v).norm();
  Scene scene;
  for (const Patch& p : patches) {
    const double share = p.weight * p.u.cross(p.v).norm() / total;
    splat_patch(p, static_cast<std::size_t>(std::round(share * static_cast<double>(options.splat_count))), rng, scene.background);
  }

  scene.background_mesh = merge_meshes({
      box_between(table_lo, table_hi),
      box_between({-0.8, -2.0, floor_z - 0.02}, {2.4, 2.0, floor_z}),
      box_between({-0.82, -2.0, floor_z}, {-0.8, 2.0, floor_z + 2.0}),
      box_between({-0.8, 1.6, floor_z}, {2.4, 1.62, floor_z + 2.0}),
      box_between(shelf_lo, shelf_hi),
  });
  scene.table_height = 0.0;

  scene.cameras[kFrontCamera] = CameraView::look_at({1.2, -0.3, 0.6}, {0.45, 0.0, 0.05}, Eigen::Vector3d::UnitZ(),
                                                   options.width, options.height, 50.0, 0.05, 20.0);
  // Wrist camera behind and above the fingers, looking past the tool point.
  const CameraView wrist_local = CameraView::look_at({0.07, 0.0, -0.11}, {0.0, 0.0, 0.12}, Eigen::Vector3d::UnitX(),
                                                     options.width, options.height, 65.0, 0.03, 20.0);
  scene.cameras[kWristCamera] = wrist_local;
  scene.camera_mounts[kWristCamera] = CameraMount{"gripper", wrist_local.camera_to_world()};
  scene.validate();
  return scene;
}

std::string write_world_assets(const Scene& world, const KinematicChain& chain, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io_error(fmt::format("cannot create directory '{}': {}", dir, ec.message()));
  SceneManifest m;
  m.splats = "background.ply";
  m.background_mesh = "background_mesh.ply";
  m.background_pose = world.background.local_to_world;
  save_gaussian_cloud(world.background, (fs::path(dir) / m.splats).string());
  save_mesh(world.background_mesh, (fs::path(dir) / m.background_mesh).string(), MeshFormat::ply_binary);
  for (const RigidObject& o : world.objects) {
    ObjectEntry e;
    e.id = o.id;
    e.visual = o.id + ".ply";
    e.collision = o.id + "_collision.ply";
    e.pose = o.pose;
    e.graspable = o.graspable;
    save_mesh(o.visual, (fs::path(dir) / e.visual).string(), MeshFormat::ply_ascii);
    save_mesh(o.collision, (fs::path(dir) / e.collision).string(), MeshFormat::ply_ascii);
    m.objects.push_back(e);
  }
  m.cameras = world.cameras;
  m.camera_mounts = world.camera_mounts;
  m.robot_base = world.robot_base;
  m.robot_chain = "robot.json";
  save_chain(chain, (fs::path(dir) / m.robot_chain).string());
  m.table_height = world.table_height;
  const std::string path = (fs::path(dir) / "scene.json").string();
  save_manifest(m, path);
  return path;
}

}  // namespace splatsim
