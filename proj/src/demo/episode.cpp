#include "splatsim/demo/episode.hpp"

#include <chrono>
#include <cmath>

#include <fmt/format.h>

#include "splatsim/core/error.hpp"
#include "splatsim/demo/script.hpp"
#include "splatsim/kinematics/collision.hpp"
#include "splatsim/kinematics/ik.hpp"
#include "splatsim/kinematics/rrt_connect.hpp"

namespace splatsim {

namespace {

struct RolloutFailure {
  std::string reason;
};

class Executor {
 public:
  Executor(const TaskSpec& task, const Scene& world, const Simulator& sim, Rng& rng, const RolloutParams& params,
           Rollout& out)
      : task_(task), world_(world), sim_(sim), rng_(rng), params_(params), out_(out) {
    state_ = sim_.initial_state(sim_.chain().home);
  }

  const SimState& state() const { return state_; }

  void apply(const Action& action) {
    if (out_.record.steps.size() + 1 >= task_.max_steps) {
      throw RolloutFailure{fmt::format("step budget of {} exhausted", task_.max_steps)};
    }
    log(action);
    state_ = sim_.step(state_, action);
    if (!sim_.audit(state_)) {
      throw RolloutFailure{fmt::format("held object intersects the table at step {}", out_.record.steps.size())};
    }
  }

  // Terminal step: hold position.
  void finish() { log(Action{state_.q, command_}); }

  void gripper(double command) {
    command_ = command;
    for (int i = 0; i < kGripperEventSteps; ++i) apply(Action{state_.q, command});
  }

  void move_to(const Keypose& key) {
    const auto t0 = std::chrono::steady_clock::now();
    Scene scene;
    scene.background = world_.background;
    scene.background_mesh = world_.background_mesh;
    scene.objects = sim_.posed_objects(state_);
    std::vector<std::string> exclude = key.exclude;
    if (state_.attached >= 0) exclude.push_back(sim_.objects()[state_.attached].id);
    CollisionChecker checker(sim_.chain(), sim_.robot_base(), scene_obstacles(scene, exclude));
    checker.set_gripper_opening(state_.gripper);
    if (state_.attached >= 0) {
      checker.attach(sim_.objects()[state_.attached].collision.transformed(state_.attach_offset));
    }
    const ValidityFn valid = [&checker](const Eigen::VectorXd& q) { return checker.valid(q); };

    IkParams ik;
    ik.seed = rng_.next();
    Eigen::VectorXd goal;
    try {
      goal = ik_damped_least_squares(sim_.chain(), sim_.robot_base().inverse() * key.pose, state_.q, ik).q;
    } catch (const IkError& e) {
      throw RolloutFailure{fmt::format("IK failed for keypose '{}': {}", key.label, e.what())};
    }
    if (!valid(state_.q)) throw RolloutFailure{fmt::format("start of move to '{}' is in collision", key.label)};
    if (!valid(goal)) throw RolloutFailure{fmt::format("IK solution for '{}' is in collision", key.label)};

    PlannerParams pp;
    pp.max_iterations = params_.planner_iterations;
    pp.seed = rng_.next();
    const PlanResult plan =
        rrt_connect(state_.q, goal, sim_.chain().lower_limits(), sim_.chain().upper_limits(), valid, pp);
    if (!plan.success) throw RolloutFailure{fmt::format("no path to '{}' within budget", key.label)};
    const Path path = shortcut_path(plan.path, valid, params_.shortcut_attempts, rng_);
    const auto traj = time_parameterize(path, task_.max_joint_velocity, task_.dt);
    out_.planning_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (std::size_t k = 1; k < traj.size(); ++k) apply(Action{traj[k].q, command_});
  }

 private:
  void log(const Action& action) {
    EpisodeStep step;
    step.t = static_cast<double>(out_.record.steps.size()) * task_.dt;
    step.joints = state_.q;
    step.gripper = state_.gripper;
    step.action_joints = action.q;
    step.action_gripper = action.gripper;
    step.object_poses = state_.object_poses;
    out_.record.steps.push_back(std::move(step));
  }

  const TaskSpec& task_;
  const Scene& world_;
  const Simulator& sim_;
  Rng& rng_;
  const RolloutParams& params_;
  Rollout& out_;
  SimState state_;
  double command_ = 1.0;
};

}  // namespace

Simulator make_simulator(const Scene& world, const KinematicChain& chain, const SceneInstance& instance) {
  return Simulator(chain, instance.robot_base, instance.objects, world.background_mesh_world(), world.table_height);
}

Rollout run_episode(const TaskSpec& task, const Scene& world, const KinematicChain& chain, std::uint64_t seed,
                    const RolloutParams& params) {
  Rng rng(seed);
  Rollout out;
  EpisodeRecord& rec = out.record;
  rec.task = to_string(task.id);
  rec.seed = seed;
  rec.dt = task.dt;

  SceneInstance inst;
  try {
    inst = randomize_scene(task, rng, world.table_height);
  } catch (const Error& e) {
    if (e.category() != ErrorCategory::generation) throw;
    out.failure = e.what();
    return out;
  }
  out.rejected_layouts = inst.rejected_layouts;
  rec.robot_base = inst.robot_base;
  rec.randomization = inst.parameters;
  for (const auto& o : inst.objects) rec.object_ids.push_back(o.id);

  const Simulator sim = make_simulator(world, chain, inst);
  Executor exec(task, world, sim, rng, params, out);
  try {
    const auto order = pick_order(task, sim, exec.state());
    for (std::size_t i = 0; i < order.size(); ++i) {
      Stage stage;
      try {
        stage = plan_stage(task, sim, exec.state(), order[i], i);
      } catch (const Error& e) {
        throw RolloutFailure{e.what()};
      }
      for (const Keypose& key : stage.keyposes) {
        switch (key.kind) {
          case KeyposeKind::move:
            exec.move_to(key);
            break;
          case KeyposeKind::close:
            exec.gripper(0.0);
            if (exec.state().attached != sim.object_index(order[i])) {
              throw RolloutFailure{fmt::format("grasp of '{}' missed", order[i])};
            }
            break;
          case KeyposeKind::open:
            exec.gripper(1.0);
            break;
        }
      }
      if (!placement_ok(task, sim, exec.state(), order[i], i)) {
        throw RolloutFailure{fmt::format("placement of '{}' (stage {}) failed its check", order[i], i)};
      }
      ++out.stages_completed;
    }
    exec.finish();
    out.success = task_success(task, sim, exec.state());
    if (!out.success) out.failure = "terminal success predicate failed";
  } catch (const RolloutFailure& f) {
    out.failure = f.reason;
    out.success = false;
  }
  rec.success = out.success;
  return out;
}

namespace {

double pose_deviation(const Pose& a, const Pose& b) {
  return std::max((a.translation - b.translation).cwiseAbs().maxCoeff(),
                  (a.rotation.coeffs() - b.rotation.coeffs()).cwiseAbs().maxCoeff());
}

}  // namespace

ReplayResult replay_episode(const TaskSpec& task, const Scene& world, const KinematicChain& chain,
                            const EpisodeRecord& record, double tolerance) {
  ReplayResult r;
  if (record.steps.empty()) {
    r.message = "record has no steps";
    return r;
  }
  if (record.object_ids.size() != task.objects.size()) {
    throw invalid_argument(fmt::format("record has {} objects, task {} has {}", record.object_ids.size(),
                                       to_string(task.id), task.objects.size()));
  }
  for (std::size_t i = 0; i < task.objects.size(); ++i) {
    if (record.object_ids[i] != task.objects[i].id) {
      throw invalid_argument(fmt::format("record object {} is '{}', task expects '{}'", i, record.object_ids[i],
                                         task.objects[i].id));
    }
  }
  SceneInstance inst;
  inst.robot_base = record.robot_base;
  inst.objects = instantiate_task_objects(task, record.steps.front().object_poses);
  const Simulator sim = make_simulator(world, chain, inst);

  SimState s = sim.initial_state(record.steps.front().joints);
  s.gripper = record.steps.front().gripper;
  r.consistent = true;
  for (std::size_t k = 0; k < record.steps.size(); ++k) {
    const EpisodeStep& logged = record.steps[k];
    double dev = std::max((s.q - logged.joints).cwiseAbs().maxCoeff(), std::abs(s.gripper - logged.gripper));
    for (std::size_t i = 0; i < s.object_poses.size(); ++i) dev = std::max(dev, pose_deviation(s.object_poses[i], logged.object_poses[i]));
    r.max_deviation = std::max(r.max_deviation, dev);
    if (dev > tolerance && r.consistent) {
      r.consistent = false;
      r.message = fmt::format("state diverges at step {} by {:.3g}", k, dev);
    }
    if (k + 1 < record.steps.size()) s = sim.step(s, Action{logged.action_joints, logged.action_gripper});
  }
  r.success = task_success(task, sim, s);
  if (r.consistent && !r.success) r.message = "final state fails the task predicate";
  return r;
}

Scene scene_at_step(const Scene& world, const TaskSpec& task, const EpisodeRecord& record, std::size_t k) {
  if (k >= record.steps.size()) throw invalid_argument(fmt::format("step {} out of range ({} steps)", k, record.steps.size()));
  Scene scene = world;
  scene.robot_base = record.robot_base;
  scene.objects = instantiate_task_objects(task, record.steps[k].object_poses);
  return scene;
}

}  // namespace splatsim
