#include "splatsim/dataset/stats.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "splatsim/core/error.hpp"
#include "splatsim/kinematics/chain_io.hpp"

namespace splatsim {

namespace fs = std::filesystem;

DatasetStats compute_stats(const std::vector<EpisodeRecord>& episodes, const KinematicChain& chain) {
  if (episodes.empty()) throw invalid_argument("dataset statistics need at least one episode");
  DatasetStats stats;
  const Eigen::Vector3d gravity(0.0, 0.0, -1.0);
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    const EpisodeRecord& ep = episodes[e];
    stats.episode_lengths.push_back(ep.steps.size());
    Eigen::Vector3d previous = Eigen::Vector3d::Zero();
    for (std::size_t k = 0; k < ep.steps.size(); ++k) {
      const Pose gripper = forward_kinematics(chain, ep.steps[k].joints, ep.robot_base).gripper;
      const Eigen::Vector3d axis = gripper.rotation_matrix().col(2);
      const double c = std::clamp(axis.dot(gravity), -1.0, 1.0);
      // atan2 keeps precision near 0 where acos does not.
      stats.gripper_angles.push_back({e, k, std::atan2(axis.cross(gravity).norm(), c)});
      if (k > 0) stats.ee_displacements.push_back({e, k, (gripper.translation - previous).norm()});
      previous = gripper.translation;
    }
    if (!ep.steps.empty()) {
      for (std::size_t i = 0; i < ep.object_ids.size(); ++i) {
        stats.initial_positions.push_back({e, ep.object_ids[i], ep.steps.front().object_poses.at(i).translation});
      }
    }
  }
  return stats;
}

DatasetStats dataset_stats(const DatasetIndex& index) {
  if (index.episodes.empty()) throw invalid_argument(fmt::format("dataset '{}' has no episodes", index.root));
  const fs::path chain_path = fs::path(index.root) / "robot.json";
  const KinematicChain chain = fs::exists(chain_path) ? load_chain(chain_path.string()) : franka_like_chain();
  std::vector<EpisodeRecord> episodes;
  episodes.reserve(index.episodes.size());
  for (std::size_t i = 0; i < index.episodes.size(); ++i) episodes.push_back(read_episode(index.episode_dir(i), false));
  return compute_stats(episodes, chain);
}

namespace {

std::ofstream open_table(const std::string& dir, const char* name, const char* header) {
  const std::string path = (fs::path(dir) / name).string();
  std::ofstream out(path);
  if (!out) throw io_error(fmt::format("cannot open '{}' for writing", path));
  out << header << "\n";
  return out;
}

}  // namespace

void write_stats(const DatasetStats& stats, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io_error(fmt::format("cannot create directory '{}': {}", dir, ec.message()));
  {
    auto out = open_table(dir, "episode_lengths.tsv", "episode\tsteps");
    for (std::size_t e = 0; e < stats.episode_lengths.size(); ++e) out << e << '\t' << stats.episode_lengths[e] << '\n';
  }
  {
    auto out = open_table(dir, "gripper_angles.tsv", "episode\tstep\tangle_rad");
    for (const auto& s : stats.gripper_angles) out << fmt::format("{}\t{}\t{}\n", s.episode, s.step, s.value);
  }
  {
    auto out = open_table(dir, "ee_displacements.tsv", "episode\tstep\tdisplacement_m");
    for (const auto& s : stats.ee_displacements) out << fmt::format("{}\t{}\t{}\n", s.episode, s.step, s.value);
  }
  {
    auto out = open_table(dir, "initial_positions.tsv", "episode\tobject\tx\ty\tz");
    for (const auto& p : stats.initial_positions) {
      out << fmt::format("{}\t{}\t{}\t{}\t{}\n", p.episode, p.object, p.position.x(), p.position.y(), p.position.z());
    }
    if (!out) throw io_error(fmt::format("write failed in '{}'", dir));
  }
}

}  // namespace splatsim
