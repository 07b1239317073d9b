#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "splatsim/core/rng.hpp"

namespace splatsim {

using ValidityFn = std::function<bool(const Eigen::VectorXd&)>;

// Default spacing of validity checks along joint-space segments (rad, max
// over joints).
inline constexpr double kDefaultResolution = 0.01;

struct Path {
  std::vector<Eigen::VectorXd> waypoints;
  // Resolution at which the segments were validated.
  double resolution = kDefaultResolution;

  bool empty() const { return waypoints.empty(); }
  // Sum of Euclidean segment lengths in joint space.
  double length() const;
};

// Checks `b` and the interior of segment ab at spacing <= resolution (max
// norm); `a` is assumed valid.
bool segment_valid(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const ValidityFn& valid, double resolution);

// Dense audit: every waypoint and every interpolated configuration.
bool path_valid(const Path& path, const ValidityFn& valid, double resolution = kDefaultResolution);

// Random shortcutting between points on the path. Endpoints are kept, the
// length never increases, and every output segment has been checked with
// segment_valid at path.resolution, so path_valid at that resolution holds
// whenever it held for the input.
Path shortcut_path(const Path& path, const ValidityFn& valid, int attempts, Rng& rng);

struct TimedConfig {
  double t = 0.0;
  Eigen::VectorXd q;
};

// Uniform resampling along the polyline by max-norm arc length, with the
// fewest steps that keep every per-step joint delta <= max_velocity * dt.
// The first and last samples equal the path endpoints.
std::vector<TimedConfig> time_parameterize(const Path& path, double max_velocity, double dt);

}  // namespace splatsim
