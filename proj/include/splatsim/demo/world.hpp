#pragma once

#include <cstdint>
#include <string>

#include "splatsim/core/scene.hpp"
#include "splatsim/kinematics/chain.hpp"

namespace splatsim {

// Synthetic stand-in for a reconstructed tabletop: a textured table, floor,
// walls and a shelf as flat splats, with a matching background collision
// mesh. The table top is z = 0 and spans x in [-0.3, 1.0], y in [-0.8, 0.8];
// the robot base sits at the origin.
struct WorldOptions {
  std::size_t splat_count = 20000;
  int width = 640;
  int height = 480;
  std::uint64_t seed = 1;
};

inline constexpr const char* kFrontCamera = "front";
inline constexpr const char* kWristCamera = "wrist";

// Cameras: "front" third-person view and "wrist", mounted on the gripper
// frame.
Scene build_world(const WorldOptions& options = {});

// Writes splats, meshes, chain and a scene manifest (scene.json) into `dir`
// and returns the manifest path.
std::string write_world_assets(const Scene& world, const KinematicChain& chain, const std::string& dir);

}  // namespace splatsim
