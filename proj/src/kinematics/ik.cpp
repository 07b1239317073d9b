#include "splatsim/kinematics/ik.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <fmt/format.h>

#include "splatsim/core/rng.hpp"

namespace splatsim {
namespace {

struct Residual {
  Eigen::Matrix<double, 6, 1> e;
  double position = 0.0;
  double rotation = 0.0;
};

Residual residual(const KinematicChain& chain, const Eigen::VectorXd& q, const Pose& target) {
  const Pose g = forward_kinematics(chain, q).gripper;
  Residual r;
  r.e.head<3>() = target.translation - g.translation;
  r.e.tail<3>() = rotation_error(g.rotation, target.rotation);
  r.position = r.e.head<3>().norm();
  r.rotation = r.e.tail<3>().norm();
  return r;
}

bool converged(const Residual& r, const IkParams& p) {
  return r.position < p.position_tolerance && r.rotation < p.rotation_tolerance;
}

// One damped least-squares descent; returns the final configuration and
// whether it converged.
bool descend(const KinematicChain& chain, const Pose& target, Eigen::VectorXd& q, const IkParams& p, IkResult& out) {
  const double lambda2 = p.damping * p.damping;
  Residual r = residual(chain, q, target);
  int it = 0;
  while (!converged(r, p) && it < p.max_iterations) {
    const Eigen::MatrixXd j = jacobian(chain, q);
    const Eigen::Matrix<double, 6, 6> jjt = j * j.transpose() + lambda2 * Eigen::Matrix<double, 6, 6>::Identity();
    Eigen::VectorXd dq = j.transpose() * jjt.ldlt().solve(r.e);
    const double biggest = dq.cwiseAbs().maxCoeff();
    if (biggest > p.max_step) dq *= p.max_step / biggest;
    q = chain.clamp(q + dq);
    r = residual(chain, q, target);
    ++it;
  }
  out.q = q;
  out.iterations = it;
  out.position_error = r.position;
  out.rotation_error = r.rotation;
  return converged(r, p);
}

}  // namespace

IkResult ik_damped_least_squares(const KinematicChain& chain, const Pose& target, const Eigen::VectorXd& q_init,
                                 const IkParams& params) {
  if (static_cast<std::size_t>(q_init.size()) != chain.dof()) {
    throw invalid_argument(fmt::format("ik: expected {} joint values, got {}", chain.dof(), q_init.size()));
  }
  if (!target.translation.allFinite() || !target.rotation.coeffs().allFinite()) {
    throw invalid_argument("ik: target pose is not finite");
  }
  if (!(params.damping > 0) || !(params.max_step > 0) || params.max_iterations < 0 || params.restarts < 0) {
    throw invalid_argument("ik: invalid parameters");
  }

  IkResult best;
  double best_score = std::numeric_limits<double>::infinity();
  Rng rng(params.seed);
  const Eigen::VectorXd lo = chain.lower_limits(), hi = chain.upper_limits();
  for (int attempt = 0; attempt <= params.restarts; ++attempt) {
    Eigen::VectorXd q = chain.clamp(q_init);
    if (attempt > 0) {
      for (Eigen::Index i = 0; i < q.size(); ++i) q[i] = rng.uniform(lo[i], hi[i]);
    }
    IkResult result;
    if (descend(chain, target, q, params, result)) return result;
    const double s = result.position_error + 0.1 * result.rotation_error;
    if (s < best_score) {
      best_score = s;
      best = result;
    }
  }
  throw IkError(fmt::format("ik: no convergence after {} attempt(s); residual {:.3g} m, {:.3g} rad",
                            params.restarts + 1, best.position_error, best.rotation_error),
                best);
}

}  // namespace splatsim
