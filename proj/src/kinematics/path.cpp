#include "splatsim/kinematics/path.hpp"

#include <algorithm>
#include <cmath>

#include "splatsim/core/error.hpp"

namespace splatsim {

double Path::length() const {
  double s = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) s += (waypoints[i] - waypoints[i - 1]).norm();
  return s;
}

bool segment_valid(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const ValidityFn& valid, double resolution) {
  if (!(resolution > 0)) throw invalid_argument("segment_valid: resolution must be positive");
  const double span = (b - a).cwiseAbs().maxCoeff();
  const int n = std::max(1, static_cast<int>(std::ceil(span / resolution - 1e-9)));
  for (int k = 1; k <= n; ++k) {
    if (!valid(a + (b - a) * (static_cast<double>(k) / n))) return false;
  }
  return true;
}

bool path_valid(const Path& path, const ValidityFn& valid, double resolution) {
  if (path.empty()) return false;
  if (!valid(path.waypoints.front())) return false;
  for (std::size_t i = 1; i < path.waypoints.size(); ++i) {
    if (!segment_valid(path.waypoints[i - 1], path.waypoints[i], valid, resolution)) return false;
  }
  return true;
}

namespace {

// Point at arc length s along the polyline; `segment` receives the index of
// the segment containing it.
Eigen::VectorXd point_at(const std::vector<Eigen::VectorXd>& w, const std::vector<double>& cum, double s,
                         std::size_t& segment) {
  const auto it = std::upper_bound(cum.begin(), cum.end(), s);
  segment = std::min<std::size_t>(static_cast<std::size_t>(std::max<long>(0, it - cum.begin() - 1)), w.size() - 2);
  const double len = cum[segment + 1] - cum[segment];
  const double u = len > 0 ? std::clamp((s - cum[segment]) / len, 0.0, 1.0) : 0.0;
  return w[segment] + (w[segment + 1] - w[segment]) * u;
}

}  // namespace

Path shortcut_path(const Path& path, const ValidityFn& valid, int attempts, Rng& rng) {
  Path out = path;
  for (int a = 0; a < attempts && out.waypoints.size() >= 3; ++a) {
    auto& w = out.waypoints;
    std::vector<double> cum(w.size(), 0.0);
    for (std::size_t i = 1; i < w.size(); ++i) cum[i] = cum[i - 1] + (w[i] - w[i - 1]).norm();
    if (cum.back() <= 0) break;
    double s0 = rng.uniform(0.0, cum.back()), s1 = rng.uniform(0.0, cum.back());
    if (s0 > s1) std::swap(s0, s1);
    std::size_t i0 = 0, i1 = 0;
    const Eigen::VectorXd p0 = point_at(w, cum, s0, i0);
    const Eigen::VectorXd p1 = point_at(w, cum, s1, i1);
    // Only worth it when at least one corner lies between the two points.
    if (i0 == i1) continue;
    if ((p1 - p0).norm() >= s1 - s0) continue;
    if (!segment_valid(p0, p1, valid, out.resolution)) continue;
    // The cut pieces of the old segments are sampled on a new grid, so they
    // are validated again: every output segment is checked on its own grid.
    if (!segment_valid(w[i0], p0, valid, out.resolution) || !segment_valid(p1, w[i1 + 1], valid, out.resolution)) {
      continue;
    }
    std::vector<Eigen::VectorXd> next(w.begin(), w.begin() + static_cast<long>(i0) + 1);
    if ((p0 - next.back()).norm() > 0) next.push_back(p0);
    if ((p1 - w[i1 + 1]).norm() > 0) next.push_back(p1);
    next.insert(next.end(), w.begin() + static_cast<long>(i1) + 1, w.end());
    w = std::move(next);
  }
  return out;
}

std::vector<TimedConfig> time_parameterize(const Path& path, double max_velocity, double dt) {
  if (!(dt > 0)) throw invalid_argument("time_parameterize: dt must be positive");
  if (!(max_velocity > 0)) throw invalid_argument("time_parameterize: max velocity must be positive");
  if (path.empty()) throw invalid_argument("time_parameterize: empty path");
  const auto& w = path.waypoints;
  std::vector<double> cum(w.size(), 0.0);
  for (std::size_t i = 1; i < w.size(); ++i) cum[i] = cum[i - 1] + (w[i] - w[i - 1]).cwiseAbs().maxCoeff();
  const double total = cum.back();
  const int n = static_cast<int>(std::ceil(total / (max_velocity * dt) - 1e-9));
  std::vector<TimedConfig> out;
  if (n <= 0) {
    out.push_back({0.0, w.front()});
    return out;
  }
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    Eigen::VectorXd q;
    if (k == 0) {
      q = w.front();
    } else if (k == n) {
      q = w.back();
    } else {
      std::size_t seg = 0;
      q = point_at(w, cum, total * k / n, seg);
    }
    out.push_back({k * dt, q});
  }
  return out;
}

}  // namespace splatsim
