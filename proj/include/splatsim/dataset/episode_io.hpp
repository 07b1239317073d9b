#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "splatsim/dataset/episode.hpp"

namespace splatsim {

// Episode directory layout:
//   meta.txt               key = value lines (seed, success, randomization, ...)
//   lowdim.bin             text header ending in "end_header", then
//                          little-endian float64 arrays in header order
//   frames/<cam>/<t>.jpg   one image per step; .png when quality is 0
//
// Quality 1..100 selects baseline JPEG; 0 stores lossless PNG.

struct CompressionStats {
  std::size_t frames = 0;
  std::size_t raw_bytes = 0;
  std::size_t encoded_bytes = 0;
  // Mean over frames of PSNR(decoded, original); the cap for lossless.
  double mean_psnr = 0.0;

  double ratio() const { return encoded_bytes == 0 ? 0.0 : static_cast<double>(raw_bytes) / encoded_bytes; }
};

struct EpisodeManifest {
  std::string dir;
  int quality = 0;
  std::size_t steps = 0;
  std::vector<std::string> cameras;
  CompressionStats compression;
};

EpisodeManifest write_episode(const EpisodeRecord& record, const std::string& dir, int quality);

// Frame decode failures raise Error(parse) naming the camera and step.
EpisodeRecord read_episode(const std::string& dir, bool load_frames = true);

std::string frame_path(const std::string& episode_dir, const std::string& camera, std::size_t step, int quality);

// Dataset root: index.txt plus ep_<i> directories.
//   splatsim_dataset 1
//   task <id>
//   base_seed <s>
//   quality <q>
//   failed_rollouts <k>
//   episodes <n>
//   episode ep_0
//   ...
struct DatasetIndex {
  std::string root;
  std::string task;
  std::uint64_t base_seed = 0;
  int quality = 0;
  std::size_t failed_rollouts = 0;
  // Directory names relative to root.
  std::vector<std::string> episodes;

  std::string episode_dir(std::size_t i) const;
};

std::string episode_dir_name(std::size_t index);
void write_index(const DatasetIndex& index);
// Verifies that every listed episode has a meta.txt.
DatasetIndex read_index(const std::string& root);

}  // namespace splatsim
