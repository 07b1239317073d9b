#include "splatsim/core/manifest.hpp"

#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "splatsim/core/error.hpp"
#include "splatsim/core/json_util.hpp"
#include "splatsim/core/mesh_io.hpp"
#include "splatsim/core/splat_io.hpp"

namespace splatsim {

namespace fs = std::filesystem;

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::not_found, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    // nlohmann reports a byte offset into the stream.
    throw ParseError(path, ParseError::Unit::byte, e.byte, e.what());
  }
}

void write_json(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw io_error("write failed for '" + path + "'");
}

Json vec3_to_json(const Eigen::Vector3d& v) { return Json::array({v.x(), v.y(), v.z()}); }

Eigen::Vector3d vec3_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw invalid_argument(what + ": expected an array of 3 numbers");
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw invalid_argument(what + ": expected an array of 3 numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

Json pose_to_json(const Pose& pose) {
  const auto& q = pose.rotation;
  return Json{{"q", Json::array({q.w(), q.x(), q.y(), q.z()})}, {"t", vec3_to_json(pose.translation)}};
}

Pose pose_from_json(const Json& j, const std::string& what) {
  if (!j.is_object()) throw invalid_argument(what + ": expected a pose object");
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  if (j.contains("q")) {
    const Json& jq = j["q"];
    if (!jq.is_array() || jq.size() != 4) throw invalid_argument(what + ".q: expected [w,x,y,z]");
    for (const auto& e : jq) {
      if (!e.is_number()) throw invalid_argument(what + ".q: expected [w,x,y,z]");
    }
    q = Eigen::Quaterniond(jq[0].get<double>(), jq[1].get<double>(), jq[2].get<double>(), jq[3].get<double>());
    if (!(q.norm() > 1e-9)) throw invalid_argument(what + ".q: zero quaternion");
  }
  if (j.contains("t")) t = vec3_from_json(j["t"], what + ".t");
  return Pose(q, t);
}

double json_number(const Json& j, const std::string& key, const std::string& what) {
  if (!j.contains(key) || !j[key].is_number()) throw invalid_argument(what + ": missing numeric field '" + key + "'");
  return j[key].get<double>();
}

double json_number_or(const Json& j, const std::string& key, double fallback, const std::string& what) {
  if (!j.contains(key)) return fallback;
  return json_number(j, key, what);
}

std::string json_string(const Json& j, const std::string& key, const std::string& what) {
  if (!j.contains(key) || !j[key].is_string()) throw invalid_argument(what + ": missing string field '" + key + "'");
  return j[key].get<std::string>();
}

Json camera_to_json(const CameraView& cam) {
  return Json{{"fx", cam.fx},         {"fy", cam.fy},   {"cx", cam.cx},
              {"cy", cam.cy},         {"width", cam.width}, {"height", cam.height},
              {"world_to_camera", pose_to_json(cam.world_to_camera)},
              {"near", cam.near},     {"far", cam.far}};
}

CameraView camera_from_json(const Json& j, const std::string& what) {
  if (!j.is_object()) throw invalid_argument(what + ": expected a camera object");
  CameraView cam;
  cam.fx = json_number(j, "fx", what);
  cam.fy = json_number(j, "fy", what);
  cam.cx = json_number(j, "cx", what);
  cam.cy = json_number(j, "cy", what);
  cam.width = static_cast<int>(json_number(j, "width", what));
  cam.height = static_cast<int>(json_number(j, "height", what));
  if (j.contains("world_to_camera")) cam.world_to_camera = pose_from_json(j["world_to_camera"], what + ".world_to_camera");
  cam.near = json_number_or(j, "near", cam.near, what);
  cam.far = json_number_or(j, "far", cam.far, what);
  cam.validate();
  return cam;
}

std::string parent_directory(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  return parent.empty() ? "." : parent.string();
}

std::string resolve_path(const std::string& base_dir, const std::string& path) {
  const fs::path p(path);
  return p.is_absolute() ? path : (fs::path(base_dir) / p).lexically_normal().string();
}

SceneManifest load_manifest(const std::string& path) {
  const Json j = read_json(path);
  const std::string what = path;
  if (!j.is_object()) throw ParseError(path, ParseError::Unit::byte, 0, "manifest root must be an object");
  SceneManifest m;
  try {
    if (!j.contains("background")) throw invalid_argument(what + ": missing 'background'");
    const Json& bg = j["background"];
    m.splats = json_string(bg, "splats", what + ".background");
    if (bg.contains("mesh")) m.background_mesh = json_string(bg, "mesh", what + ".background");
    if (bg.contains("pose")) m.background_pose = pose_from_json(bg["pose"], what + ".background.pose");
    if (j.contains("objects")) {
      for (const Json& o : j["objects"]) {
        ObjectEntry e;
        e.id = json_string(o, "id", what + ".objects");
        const std::string ow = what + ".objects[" + e.id + "]";
        e.visual = json_string(o, "visual", ow);
        if (o.contains("collision")) e.collision = json_string(o, "collision", ow);
        if (o.contains("pose")) e.pose = pose_from_json(o["pose"], ow + ".pose");
        if (o.contains("graspable")) e.graspable = o["graspable"].get<bool>();
        m.objects.push_back(std::move(e));
      }
    }
    if (j.contains("cameras")) {
      for (const auto& [name, c] : j["cameras"].items()) {
        m.cameras[name] = camera_from_json(c, what + ".cameras." + name);
        if (c.contains("mount")) {
          const Json& mj = c["mount"];
          CameraMount mount;
          mount.frame = json_string(mj, "frame", what + ".cameras." + name + ".mount");
          if (mj.contains("offset")) mount.frame_to_camera = pose_from_json(mj["offset"], name + ".mount.offset");
          m.camera_mounts[name] = mount;
        }
      }
    }
    if (j.contains("robot")) {
      const Json& r = j["robot"];
      if (r.contains("base")) m.robot_base = pose_from_json(r["base"], what + ".robot.base");
      if (r.contains("chain")) m.robot_chain = json_string(r, "chain", what + ".robot");
    }
    m.table_height = json_number_or(j, "table_height", 0.0, what);
  } catch (const Json::exception& e) {
    throw invalid_argument(what + ": " + e.what());
  }
  return m;
}

void save_manifest(const SceneManifest& m, const std::string& path) {
  Json j;
  j["background"] = Json{{"splats", m.splats}, {"pose", pose_to_json(m.background_pose)}};
  if (!m.background_mesh.empty()) j["background"]["mesh"] = m.background_mesh;
  j["objects"] = Json::array();
  for (const auto& e : m.objects) {
    Json o{{"id", e.id}, {"visual", e.visual}, {"pose", pose_to_json(e.pose)}, {"graspable", e.graspable}};
    if (!e.collision.empty()) o["collision"] = e.collision;
    j["objects"].push_back(std::move(o));
  }
  j["cameras"] = Json::object();
  for (const auto& [name, cam] : m.cameras) {
    Json c = camera_to_json(cam);
    if (const auto it = m.camera_mounts.find(name); it != m.camera_mounts.end()) {
      c["mount"] = Json{{"frame", it->second.frame}, {"offset", pose_to_json(it->second.frame_to_camera)}};
    }
    j["cameras"][name] = std::move(c);
  }
  j["robot"] = Json{{"base", pose_to_json(m.robot_base)}};
  if (!m.robot_chain.empty()) j["robot"]["chain"] = m.robot_chain;
  j["table_height"] = m.table_height;
  write_json(j, path);
}

Scene load_scene(const SceneManifest& m, const std::string& dir) {
  Scene scene;
  scene.background = load_gaussian_cloud(resolve_path(dir, m.splats));
  scene.background.local_to_world = m.background_pose;
  if (!m.background_mesh.empty()) scene.background_mesh = load_mesh(resolve_path(dir, m.background_mesh)).mesh;
  for (const auto& e : m.objects) {
    TriangleMesh visual = load_mesh(resolve_path(dir, e.visual)).mesh;
    TriangleMesh collision = e.collision.empty() ? visual : load_mesh(resolve_path(dir, e.collision)).mesh;
    scene.objects.push_back(RigidObject::make(e.id, std::move(visual), std::move(collision), e.pose, e.graspable));
  }
  scene.cameras = m.cameras;
  scene.camera_mounts = m.camera_mounts;
  scene.robot_base = m.robot_base;
  scene.table_height = m.table_height;
  scene.validate();
  return scene;
}

Scene load_scene(const std::string& manifest_path) {
  return load_scene(load_manifest(manifest_path), parent_directory(manifest_path));
}

}  // namespace splatsim
