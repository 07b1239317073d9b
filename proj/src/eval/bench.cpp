#include "splatsim/eval/bench.hpp"

#include <chrono>
#include <cmath>

#include "splatsim/core/error.hpp"
#include "splatsim/core/image_io.hpp"
#include "splatsim/demo/episode.hpp"
#include "splatsim/demo/observation.hpp"

namespace splatsim {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

double TimingReport::accounting_error() const {
  return total_ms > 0.0 ? std::abs(component_sum() - total_ms) / total_ms : 0.0;
}

TimingReport bench(const Scene& world, const KinematicChain& chain, const TaskSpec& task, const BenchOptions& options) {
  if (options.steps < 1) throw invalid_argument("bench needs at least one step");
  if (options.quality < 0 || options.quality > 100) throw invalid_argument("quality must be in 0..100");
  TimingReport r;
  if (world.cameras.empty()) throw invalid_argument("bench needs at least one camera");
  r.width = world.cameras.begin()->second.width;
  r.height = world.cameras.begin()->second.height;
  r.cameras = world.cameras.size();
  r.splats = world.background.size();

  const RobotVisual robot(chain);
  double physics = 0.0, render = 0.0, planning = 0.0, other = 0.0;
  const auto t0 = Clock::now();
  for (std::uint64_t i = 0; r.steps < options.steps; ++i) {
    const auto ts = Clock::now();
    const Rollout rollout = run_episode(task, world, chain, derive_seed(options.seed, i));
    const double rollout_seconds = seconds_since(ts);
    planning += rollout.planning_seconds;
    physics += rollout_seconds - rollout.planning_seconds;
    ++r.rollouts;
    if (!rollout.success) {
      ++r.failed_rollouts;
      continue;
    }
    const auto tb = Clock::now();
    Scene scene = scene_at_step(world, task, rollout.record, 0);
    other += seconds_since(tb);
    for (const EpisodeStep& s : rollout.record.steps) {
      const auto tr = Clock::now();
      for (std::size_t k = 0; k < scene.objects.size(); ++k) scene.objects[k].pose = s.object_poses[k];
      const auto frames = render_observation(scene, robot, chain, s.joints, s.gripper);
      const auto te = Clock::now();
      render += std::chrono::duration<double>(te - tr).count();
      for (const auto& [cam, image] : frames) {
        r.encoded_bytes += options.quality == 0 ? encode_png(image).size() : encode_jpeg(image, options.quality).size();
      }
      other += seconds_since(te);
      ++r.steps;
    }
  }
  const double total = seconds_since(t0);
  const double per_step = 1000.0 / static_cast<double>(r.steps);
  r.physics_ms = physics * per_step;
  r.render_ms = render * per_step;
  r.planning_ms = planning * per_step;
  r.other_ms = other * per_step;
  r.total_ms = total * per_step;
  return r;
}

}  // namespace splatsim
