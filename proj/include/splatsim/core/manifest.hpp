#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "splatsim/core/camera.hpp"
#include "splatsim/core/pose.hpp"
#include "splatsim/core/scene.hpp"

namespace splatsim {

// JSON scene description. Asset paths are relative to the manifest's
// directory unless absolute.
//
//   {
//     "background": {"splats": "bg.ply", "mesh": "bg_mesh.ply",
//                    "pose": {"q": [w,x,y,z], "t": [x,y,z]}},
//     "objects": [{"id": "cube", "visual": "cube.obj", "collision": "cube.obj",
//                  "pose": {...}, "graspable": true}],
//     "cameras": {"third": {"fx": ..., "fy": ..., "cx": ..., "cy": ...,
//                           "width": 640, "height": 480,
//                           "world_to_camera": {...}, "near": 0.05, "far": 100,
//                           "mount": {"frame": "flange", "offset": {...}}}},
//     "robot": {"base": {...}, "chain": "robot.json"},
//     "table_height": 0.0
//   }
struct ObjectEntry {
  std::string id;
  std::string visual;
  // Defaults to the visual mesh when empty.
  std::string collision;
  Pose pose;
  bool graspable = true;
};

struct SceneManifest {
  std::string splats;
  std::string background_mesh;
  Pose background_pose;
  std::vector<ObjectEntry> objects;
  std::map<std::string, CameraView> cameras;
  std::map<std::string, CameraMount> camera_mounts;
  Pose robot_base;
  std::string robot_chain;
  double table_height = 0.0;
};

SceneManifest load_manifest(const std::string& path);
void save_manifest(const SceneManifest& manifest, const std::string& path);

// Loads every referenced asset. `manifest_dir` anchors relative paths.
Scene load_scene(const SceneManifest& manifest, const std::string& manifest_dir);
Scene load_scene(const std::string& manifest_path);

// Directory of `path`, or "." for bare file names.
std::string parent_directory(const std::string& path);
std::string resolve_path(const std::string& base_dir, const std::string& path);

}  // namespace splatsim
