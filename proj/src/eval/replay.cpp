#include "splatsim/eval/replay.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "splatsim/core/error.hpp"
#include "splatsim/dataset/episode_io.hpp"
#include "splatsim/demo/episode.hpp"
#include "splatsim/demo/observation.hpp"
#include "splatsim/eval/metrics.hpp"

namespace splatsim {

MetricReport summarize(std::string label, std::vector<FrameMetric> frames) {
  MetricReport r;
  r.label = std::move(label);
  r.frames = std::move(frames);
  r.count = r.frames.size();
  if (r.count == 0) return r;
  const double n = static_cast<double>(r.count);
  for (const auto& f : r.frames) {
    r.mean_psnr += f.psnr;
    r.mean_ssim += f.ssim;
  }
  r.mean_psnr /= n;
  r.mean_ssim /= n;
  for (const auto& f : r.frames) {
    r.std_psnr += (f.psnr - r.mean_psnr) * (f.psnr - r.mean_psnr) / n;
    r.std_ssim += (f.ssim - r.mean_ssim) * (f.ssim - r.mean_ssim) / n;
  }
  r.std_psnr = std::sqrt(r.std_psnr);
  r.std_ssim = std::sqrt(r.std_ssim);
  return r;
}

MetricReport replay_compare(const EpisodeRecord& stored, const TaskSpec& task, const Scene& world,
                            const KinematicChain& chain, const ReplayCompareOptions& options) {
  if (options.stride == 0) throw invalid_argument("stride must be >= 1");
  if (stored.steps.empty()) throw invalid_argument("episode has no steps");
  std::vector<std::string> cameras = options.cameras;
  if (cameras.empty()) {
    for (const auto& [cam, frames] : stored.frames) cameras.push_back(cam);
  }
  if (cameras.empty()) throw Error(ErrorCategory::not_found, "episode has no stored frames");
  for (const auto& cam : cameras) {
    if (!stored.frames.count(cam)) {
      std::string have;
      for (const auto& [name, frames] : stored.frames) have += (have.empty() ? "" : ", ") + name;
      throw Error(ErrorCategory::not_found, fmt::format("episode has no frames for camera '{}' (stored: {})", cam, have));
    }
    world.camera(cam);  // throws not_found listing the scene's cameras
  }

  Scene scene = scene_at_step(world, task, stored, 0);
  scene.background.local_to_world = options.scene_perturbation * scene.background.local_to_world;
  const RobotVisual robot(chain);
  std::vector<FrameMetric> metrics;
  for (std::size_t k = 0; k < stored.steps.size(); k += options.stride) {
    const EpisodeStep& s = stored.steps[k];
    for (std::size_t i = 0; i < scene.objects.size(); ++i) scene.objects[i].pose = s.object_poses[i];
    const auto rendered = render_observation(scene, robot, chain, s.joints, s.gripper, cameras);
    for (const auto& cam : cameras) {
      const Image8& a = stored.frames.at(cam)[k];
      const Image8& b = rendered.at(cam);
      if (!a.same_size(b)) {
        throw invalid_argument(fmt::format("camera '{}' step {}: stored frame is {}x{}, scene renders {}x{}", cam, k,
                                           a.width, a.height, b.width, b.height));
      }
      metrics.push_back({cam, k, psnr(a, b), ssim(a, b)});
    }
  }
  return summarize("synthetic replay: stored frames vs re-render from logged states", std::move(metrics));
}

MetricReport replay_compare(const std::string& episode_dir, const TaskSpec& task, const Scene& world,
                            const KinematicChain& chain, const ReplayCompareOptions& options) {
  return replay_compare(read_episode(episode_dir, true), task, world, chain, options);
}

}  // namespace splatsim
