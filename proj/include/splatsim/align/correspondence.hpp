#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace splatsim {

// Paired points: source[i] corresponds to target[i].
struct CorrespondenceSet {
  std::vector<Eigen::Vector3d> source;
  std::vector<Eigen::Vector3d> target;

  std::size_t size() const { return source.size(); }
  // Equal counts >= 3, finite coordinates.
  void validate() const;
};

// Text table, one pair per line: "sx sy sz tx ty tz". Blank lines and lines
// starting with '#' are ignored.
CorrespondenceSet read_correspondences(const std::string& path);
void write_correspondences(const CorrespondenceSet& corr, const std::string& path);

}  // namespace splatsim
