#include "splatsim/kinematics/rrt_connect.hpp"

#include <algorithm>
#include <limits>


#include "splatsim/core/error.hpp"

namespace splatsim {
namespace {

struct Tree {
  std::vector<Eigen::VectorXd> nodes;
  std::vector<int> parent;

  int add(const Eigen::VectorXd& q, int p) {
    nodes.push_back(q);
    parent.push_back(p);
    return static_cast<int>(nodes.size()) - 1;
  }

  // Lowest index wins ties, keeping runs reproducible.
  int nearest(const Eigen::VectorXd& q) const {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double d = (nodes[i] - q).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    return best;
  }

  // Root-to-node configurations.
  std::vector<Eigen::VectorXd> branch(int node) const {
    std::vector<Eigen::VectorXd> out;
    for (int n = node; n >= 0; n = parent[static_cast<std::size_t>(n)]) out.push_back(nodes[static_cast<std::size_t>(n)]);
    std::reverse(out.begin(), out.end());
    return out;
  }
};

enum class Status { trapped, advanced, reached };

class Planner {
 public:
  Planner(const ValidityFn& valid, const PlannerParams& params) : valid_(valid), params_(params) {}

  // One step of at most params.step (max norm) from the nearest node.
  Status extend(Tree& tree, const Eigen::VectorXd& target, int& added) const {
    const int near = tree.nearest(target);
    const Eigen::VectorXd& from = tree.nodes[static_cast<std::size_t>(near)];
    const Eigen::VectorXd delta = target - from;
    const double span = delta.cwiseAbs().maxCoeff();
    const bool reach = span <= params_.step;
    const Eigen::VectorXd q = reach ? target : Eigen::VectorXd(from + delta * (params_.step / span));
    if (!segment_valid(from, q, valid_, params_.resolution)) return Status::trapped;
    added = tree.add(q, near);
    return reach ? Status::reached : Status::advanced;
  }

  Status connect(Tree& tree, const Eigen::VectorXd& target, int& added) const {
    Status s = Status::advanced;
    while (s == Status::advanced) s = extend(tree, target, added);
    return s;
  }

 private:
  const ValidityFn& valid_;
  const PlannerParams& params_;
};

}  // namespace

PlanResult rrt_connect(const Eigen::VectorXd& start, const Eigen::VectorXd& goal, const Eigen::VectorXd& lower,
                       const Eigen::VectorXd& upper, const ValidityFn& valid, const PlannerParams& params) {
  if (start.size() != goal.size() || start.size() != lower.size() || start.size() != upper.size()) {
    throw invalid_argument("rrt_connect: dimension mismatch");
  }
  if (!(params.step > 0) || !(params.resolution > 0) || params.max_iterations < 0) {
    throw invalid_argument("rrt_connect: invalid parameters");
  }
  if (!valid(start)) throw Error(ErrorCategory::planning, "rrt_connect: start configuration is invalid");
  if (!valid(goal)) throw Error(ErrorCategory::planning, "rrt_connect: goal configuration is invalid");

  PlanResult result;
  result.path.resolution = params.resolution;
  if (segment_valid(start, goal, valid, params.resolution)) {
    result.success = true;
    result.path.waypoints = {start, goal};
    if (start == goal) result.path.waypoints.pop_back();
    return result;
  }

  Rng rng(params.seed);
  Tree a, b;
  a.add(start, -1);
  b.add(goal, -1);
  bool a_is_start = true;
  const Planner planner(valid, params);
  Eigen::VectorXd sample(start.size());
  for (int it = 0; it < params.max_iterations; ++it) {
    result.iterations = it + 1;
    for (Eigen::Index k = 0; k < sample.size(); ++k) sample[k] = rng.uniform(lower[k], upper[k]);
    int na = -1;
    if (planner.extend(a, sample, na) != Status::trapped) {
      int nb = -1;
      if (planner.connect(b, a.nodes[static_cast<std::size_t>(na)], nb) == Status::reached) {
        std::vector<Eigen::VectorXd> from_a = a.branch(na);
        std::vector<Eigen::VectorXd> from_b = b.branch(nb);
        // from_b ends at the shared configuration; drop it and walk back to b's root.
        from_b.pop_back();
        std::reverse(from_b.begin(), from_b.end());
        from_a.insert(from_a.end(), from_b.begin(), from_b.end());
        if (!a_is_start) std::reverse(from_a.begin(), from_a.end());
        result.success = true;
        result.path.waypoints = std::move(from_a);
        return result;
      }
    }
    std::swap(a, b);
    a_is_start = !a_is_start;
  }
  return result;
}

}  // namespace splatsim
