#include <doctest.h>

#include <cmath>

#include "splatsim/core/error.hpp"
#include "splatsim/core/manifest.hpp"
#include "splatsim/dataset/episode_io.hpp"
#include "splatsim/demo/generator.hpp"
#include "splatsim/demo/world.hpp"
#include "splatsim/eval/bench.hpp"
#include "splatsim/eval/metrics.hpp"
#include "splatsim/eval/replay.hpp"
#include "splatsim/eval/report.hpp"
#include "test_util.hpp"

using namespace splatsim;
using namespace splatsim::testing;

namespace {

Scene small_world(std::size_t splats = 3000) {
  WorldOptions o;
  o.splat_count = splats;
  o.width = 160;
  o.height = 120;
  return build_world(o);
}

const KinematicChain& chain() {
  static const KinematicChain c = franka_like_chain();
  return c;
}

// One generated pick_drop episode at the given quality; the scene is the
// reloaded copy written next to the dataset.
struct Generated {
  TempDir dir;
  TaskSpec task = default_task(TaskId::pick_drop);
  DatasetIndex index;
  Scene scene;

  explicit Generated(int quality) : dir("eval_q" + std::to_string(quality)) {
    GenerateOptions o;
    o.task = task;
    o.episodes = 1;
    o.seed = 21;
    o.quality = quality;
    o.out = dir.path().string();
    index = generate_dataset(o, small_world(), chain()).index;
    scene = load_scene((dir.path() / "scene" / "scene.json").string());
  }
};

}  // namespace

TEST_CASE("lossless episodes replay at the PSNR cap with SSIM 1") {
  Generated g(0);
  const MetricReport r = replay_compare(g.index.episode_dir(0), g.task, g.scene, chain());
  const EpisodeRecord rec = read_episode(g.index.episode_dir(0), false);
  CHECK(r.count == 2 * rec.steps.size());
  for (const auto& f : r.frames) {
    CHECK(f.psnr == kPsnrCap);
    CHECK(f.ssim == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(r.std_psnr == 0.0);
}

TEST_CASE("JPEG storage and scene perturbation lower replay fidelity") {
  Generated g(40);
  ReplayCompareOptions opt;
  opt.stride = 4;
  const MetricReport stored = replay_compare(g.index.episode_dir(0), g.task, g.scene, chain(), opt);
  CHECK(stored.mean_psnr < kPsnrCap);
  CHECK(stored.mean_psnr >= 30.0);
  CHECK(stored.mean_ssim > 0.9);
  opt.scene_perturbation = Pose::from_translation({0.02, 0.0, 0.0});
  const MetricReport shifted = replay_compare(g.index.episode_dir(0), g.task, g.scene, chain(), opt);
  CHECK(shifted.mean_psnr < stored.mean_psnr);
  CHECK(shifted.mean_ssim < stored.mean_ssim);
  MESSAGE("quality 40 replay PSNR " << stored.mean_psnr << " dB, shifted by 2 cm " << shifted.mean_psnr << " dB");
}

TEST_CASE("replay_compare rejects unknown cameras") {
  Generated g(0);
  ReplayCompareOptions opt;
  opt.cameras = {"side"};
  try {
    replay_compare(g.index.episode_dir(0), g.task, g.scene, chain(), opt);
    FAIL("expected not_found");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::not_found);
    CHECK(std::string(e.what()).find("side") != std::string::npos);
  }
  Scene one_camera = g.scene;
  one_camera.cameras.erase(kWristCamera);
  opt.cameras = {kWristCamera};
  CHECK_THROWS_AS(replay_compare(g.index.episode_dir(0), g.task, one_camera, chain(), opt), Error);
}

TEST_CASE("summaries use the population mean and deviation") {
  const MetricReport r = summarize("x", {{"a", 0, 10.0, 0.5}, {"a", 1, 20.0, 0.7}, {"b", 0, 30.0, 0.9}});
  CHECK(r.count == 3);
  CHECK(r.mean_psnr == doctest::Approx(20.0));
  CHECK(r.std_psnr == doctest::Approx(std::sqrt(200.0 / 3.0)));
  CHECK(r.mean_ssim == doctest::Approx(0.7));
  const std::string table = format_metric_table(r, true);
  CHECK(table.find("all") != std::string::npos);
  const Json j = metric_report_to_json(r);
  CHECK(j["count"] == 3);
  CHECK(j["psnr"]["mean"].get<double>() == doctest::Approx(20.0));
  CHECK(j["frames"].size() == 3);
}

TEST_CASE("bench components add up to the measured total") {
  const Scene world = small_world();
  BenchOptions opt;
  opt.steps = 40;
  opt.seed = 5;
  const TimingReport r = bench(world, chain(), default_task(TaskId::pick_drop), opt);
  CHECK(r.steps >= 40);
  CHECK(r.cameras == 2);
  CHECK(r.width == 160);
  CHECK(r.physics_ms > 0.0);
  CHECK(r.render_ms > 0.0);
  CHECK(r.planning_ms > 0.0);
  CHECK(r.other_ms > 0.0);
  CHECK(r.accounting_error() <= 0.05);
  const std::string table = format_timing_table(r);
  for (const char* ref : {"26.64", "12.93", "0.36", "1.53", "41.46"}) CHECK(table.find(ref) != std::string::npos);
  const Json j = timing_report_to_json(r);
  CHECK(j["ms_per_step"]["total"].get<double>() == doctest::Approx(r.total_ms));
  CHECK(j["reference_ms_per_step"]["physics"].get<double>() == 26.64);
}

TEST_CASE("doubling the splat count increases render time") {
  BenchOptions opt;
  opt.steps = 30;
  opt.seed = 9;
  const TaskSpec task = default_task(TaskId::pick_drop);
  // Same seed: identical rollouts, so only the splat count differs.
  const TimingReport a = bench(small_world(20000), chain(), task, opt);
  const TimingReport b = bench(small_world(40000), chain(), task, opt);
  CHECK(a.steps == b.steps);
  // Requested counts differ by 2x; a few splats per patch fall outside.
  CHECK(std::abs(static_cast<double>(b.splats) / a.splats - 2.0) < 0.01);
  CHECK(b.render_ms > a.render_ms);
  MESSAGE("render ms/step: " << a.render_ms << " at " << a.splats << " splats, " << b.render_ms << " at " << b.splats);
}
