#include "splatsim/demo/generator.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "splatsim/core/error.hpp"
#include "splatsim/core/manifest.hpp"
#include "splatsim/demo/observation.hpp"
#include "splatsim/demo/world.hpp"
#include "splatsim/kinematics/chain_io.hpp"

namespace splatsim {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct EpisodeOutcome {
  bool done = false;
  std::size_t failed = 0;
  std::size_t steps = 0;
  std::size_t frames = 0;
  std::vector<std::string> reasons;
  double simulate = 0.0, render = 0.0, write = 0.0;
};

}  // namespace

void render_episode_frames(EpisodeRecord& record, const TaskSpec& task, const Scene& world,
                           const KinematicChain& chain) {
  const RobotVisual robot(chain);
  Scene scene = scene_at_step(world, task, record, 0);
  record.frames.clear();
  for (std::size_t k = 0; k < record.steps.size(); ++k) {
    for (std::size_t i = 0; i < scene.objects.size(); ++i) scene.objects[i].pose = record.steps[k].object_poses[i];
    const EpisodeStep& s = record.steps[k];
    for (auto& [cam, image] : render_observation(scene, robot, chain, s.joints, s.gripper)) {
      record.frames[cam].push_back(std::move(image));
    }
  }
}

GenerateReport generate_dataset(const GenerateOptions& options, const Scene& world, const KinematicChain& chain) {
  namespace fs = std::filesystem;
  options.task.validate();
  if (options.episodes < 1) throw invalid_argument("episodes must be >= 1");
  if (options.workers < 1) throw invalid_argument("workers must be >= 1");
  if (options.max_attempts < 1) throw invalid_argument("max_attempts must be >= 1");
  if (options.quality < 0 || options.quality > 100) throw invalid_argument("quality must be in 0..100");
  if (options.out.empty()) throw invalid_argument("output directory is empty");

  const auto t0 = Clock::now();
  std::error_code ec;
  fs::create_directories(options.out, ec);
  if (ec) throw io_error(fmt::format("cannot create directory '{}': {}", options.out, ec.message()));
  save_chain(chain, (fs::path(options.out) / "robot.json").string());
  save_task(options.task, (fs::path(options.out) / "task.json").string());
  // With a written scene, everything runs on its reloaded copy so that a
  // later re-render from those files reproduces the stored frames exactly.
  Scene reloaded;
  if (options.write_scene) reloaded = load_scene(write_world_assets(world, chain, (fs::path(options.out) / "scene").string()));
  const Scene& used = options.write_scene ? reloaded : world;

  DatasetIndex index;
  index.root = options.out;
  index.task = to_string(options.task.id);
  index.base_seed = options.seed;
  index.quality = options.quality;
  for (std::size_t i = 0; i < options.episodes; ++i) index.episodes.push_back(episode_dir_name(i));

  std::vector<EpisodeOutcome> outcomes(options.episodes);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex progress_mutex;
  std::exception_ptr worker_error;
  std::mutex error_mutex;

  auto work = [&] {
    try {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= options.episodes || abort.load()) return;
        EpisodeOutcome& out = outcomes[i];
        Rollout rollout;
        for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
          const auto ts = Clock::now();
          rollout = run_episode(options.task, used, chain, derive_seed(options.seed, i, attempt), options.rollout);
          out.simulate += seconds_since(ts);
          if (rollout.success) break;
          ++out.failed;
          out.reasons.push_back(fmt::format("attempt {}: {}", attempt, rollout.failure));
        }
        if (!rollout.success) {
          abort.store(true);
          return;
        }
        EpisodeRecord& rec = rollout.record;
        out.steps = rec.steps.size();
        if (options.render) {
          const auto tr = Clock::now();
          render_episode_frames(rec, options.task, used, chain);
          out.render += seconds_since(tr);
          for (const auto& [cam, frames] : rec.frames) out.frames += frames.size();
        }
        const auto tw = Clock::now();
        write_episode(rec, index.episode_dir(i), options.render ? options.quality : 0);
        out.write += seconds_since(tw);
        out.done = true;
        if (options.progress) {
          const std::lock_guard<std::mutex> lock(progress_mutex);
          options.progress(fmt::format("episode {} done: {} steps, {} rejected rollouts", i, out.steps, out.failed));
        }
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mutex);
      if (!worker_error) worker_error = std::current_exception();
      abort.store(true);
    }
  };

  const int n_threads = static_cast<int>(std::min<std::size_t>(options.workers, options.episodes));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < n_threads; ++w) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }
  if (worker_error) std::rethrow_exception(worker_error);

  GenerateReport report;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const EpisodeOutcome& o = outcomes[i];
    if (!o.done && o.failed >= static_cast<std::size_t>(options.max_attempts)) {
      std::string msg = fmt::format("episode {} failed all {} rollouts (base seed {}):", i, options.max_attempts,
                                    options.seed);
      for (const auto& r : o.reasons) msg += "\n  " + r;
      throw Error(ErrorCategory::generation, msg);
    }
    report.failed_rollouts += o.failed;
    report.total_steps += o.steps;
    report.frames += o.frames;
    report.simulate_seconds += o.simulate;
    report.render_seconds += o.render;
    report.write_seconds += o.write;
  }
  index.failed_rollouts = report.failed_rollouts;
  write_index(index);
  report.index = index;
  report.wall_seconds = seconds_since(t0);
  return report;
}

}  // namespace splatsim
