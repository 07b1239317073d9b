#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "splatsim/align/correspondence.hpp"
#include "splatsim/align/scene_alignment.hpp"
#include "splatsim/core/error.hpp"
#include "splatsim/core/image_io.hpp"
#include "splatsim/core/json_util.hpp"
#include "splatsim/core/manifest.hpp"
#include "splatsim/core/rng.hpp"
#include "splatsim/dataset/episode_io.hpp"
#include "splatsim/dataset/stats.hpp"
#include "splatsim/demo/generator.hpp"
#include "splatsim/demo/observation.hpp"
#include "splatsim/demo/task.hpp"
#include "splatsim/demo/world.hpp"
#include "splatsim/eval/bench.hpp"
#include "splatsim/eval/replay.hpp"
#include "splatsim/eval/report.hpp"
#include "splatsim/kinematics/chain_io.hpp"
#include "splatsim/render/compositor.hpp"
#include "splatsim/render/mesh_rasterizer.hpp"

namespace fs = std::filesystem;
using namespace splatsim;

namespace {

// Exit codes: 0 success, 1 unexpected failure, 2 usage, 3.. one per
// ErrorCategory in declaration order.
constexpr int kExitUsage = 2;

int exit_code(ErrorCategory c) { return 3 + static_cast<int>(c); }

// One line, key=value, message quoted with embedded quotes escaped.
void report_error(std::string_view category, const std::string& message) {
  std::string quoted;
  for (char ch : message) {
    if (ch == '"' || ch == '\\') quoted += '\\';
    quoted += ch == '\n' ? ' ' : ch;
  }
  std::cerr << fmt::format("error category={} message=\"{}\"\n", category, quoted);
}

struct LoadedScene {
  Scene scene;
  KinematicChain chain;
  SceneManifest manifest;
  std::string dir;
};

LoadedScene load_scene_with_chain(const std::string& manifest_path) {
  LoadedScene out;
  out.manifest = load_manifest(manifest_path);
  out.dir = parent_directory(manifest_path);
  out.scene = load_scene(out.manifest, out.dir);
  out.chain = out.manifest.robot_chain.empty() ? franka_like_chain()
                                               : load_chain(resolve_path(out.dir, out.manifest.robot_chain));
  return out;
}

// Task name or path to a task JSON file.
TaskSpec resolve_task(const std::string& arg) {
  if (fs::is_regular_file(arg)) return load_task(arg);
  return default_task(task_id_from_string(arg));
}

Eigen::VectorXd parse_joints(const std::string& text, const KinematicChain& chain) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw invalid_argument(fmt::format("--joints: '{}' is not a number", item));
    }
  }
  if (values.size() != chain.dof()) {
    throw invalid_argument(fmt::format("--joints has {} values, the chain has {} joints", values.size(), chain.dof()));
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::string format_pose(const Pose& p) {
  const Eigen::Quaterniond& q = p.rotation;
  return fmt::format("t = [{:.6f}, {:.6f}, {:.6f}]  q(wxyz) = [{:.6f}, {:.6f}, {:.6f}, {:.6f}]", p.translation.x(),
                     p.translation.y(), p.translation.z(), q.w(), q.x(), q.y(), q.z());
}

// ---------------------------------------------------------------- align

struct AlignArgs {
  std::string scene, depth, marker, camera = kFrontCamera, out;
  bool no_icp = false;
  std::uint64_t seed = 0;
  std::size_t mesh_samples = 20000;
  int depth_stride = 4;
};

int run_align(const AlignArgs& a) {
  LoadedScene ls = load_scene_with_chain(a.scene);
  const DepthImage depth = read_depth(a.depth);
  const CorrespondenceSet marker = read_correspondences(a.marker);
  const auto cams = posed_cameras(ls.scene, ls.chain, ls.chain.home);
  const auto it = cams.find(a.camera);
  if (it == cams.end()) ls.scene.camera(a.camera);  // throws not_found with the available names
  SceneAlignmentOptions opt;
  opt.use_icp = !a.no_icp;
  opt.seed = a.seed;
  opt.mesh_samples = a.mesh_samples;
  opt.depth_stride = a.depth_stride;
  const SceneAlignment r = align_scene(ls.scene, depth, it->second, marker, opt);

  std::cout << "coarse (marker) pose: " << format_pose(r.coarse) << "\n";
  std::cout << "final pose:           " << format_pose(r.pose) << "\n";
  if (opt.use_icp) {
    std::cout << fmt::format("icp: residual {:.6g} m, {} iterations, {} inliers, converged {}\n", r.icp.residual,
                             r.icp.iterations, r.icp.inliers, r.icp.converged ? "yes" : "no");
  } else {
    std::cout << "icp: disabled\n";
  }

  const std::string out = a.out.empty() ? a.scene : a.out;
  SceneManifest m = ls.manifest;
  m.background_pose = r.pose;
  if (fs::weakly_canonical(parent_directory(out)) != fs::weakly_canonical(ls.dir)) {
    // Keep asset references valid from the new location.
    auto absolute = [&](std::string& p) {
      if (!p.empty()) p = fs::absolute(resolve_path(ls.dir, p)).string();
    };
    absolute(m.splats);
    absolute(m.background_mesh);
    absolute(m.robot_chain);
    for (auto& o : m.objects) {
      absolute(o.visual);
      absolute(o.collision);
    }
  }
  save_manifest(m, out);
  std::cout << "wrote " << out << "\n";
  return 0;
}

// ---------------------------------------------------------------- render

struct RenderArgs {
  std::string scene, camera = kFrontCamera, out, joints;
  int quality = 90;
  std::string depth_out;
};

int run_render(const RenderArgs& a) {
  const LoadedScene ls = load_scene_with_chain(a.scene);
  const Eigen::VectorXd q = a.joints.empty() ? ls.chain.home : parse_joints(a.joints, ls.chain);
  const RobotVisual robot(ls.chain);
  ls.scene.camera(a.camera);
  const auto images = render_observation(ls.scene, robot, ls.chain, q, ls.chain.gripper_max_opening, {a.camera});
  write_image(images.at(a.camera), a.out, a.quality);
  std::cout << fmt::format("wrote {} ({}x{})\n", a.out, images.at(a.camera).width, images.at(a.camera).height);
  if (!a.depth_out.empty()) {
    const auto cams = posed_cameras(ls.scene, ls.chain, q);
    Scene scene = ls.scene;
    const auto inst = robot.instances(q, ls.chain.gripper_max_opening, scene.robot_base);
    const RenderBuffers buf = render_view(cams.at(a.camera), scene, inst);
    DepthImage depth(buf.width, buf.height);
    for (std::size_t i = 0; i < depth.depth.size(); ++i) depth.depth[i] = static_cast<float>(buf.depth[i]);
    write_depth(depth, a.depth_out);
    std::cout << "wrote " << a.depth_out << "\n";
  }
  return 0;
}

// -------------------------------------------------------------- generate

struct WorldArgs {
  std::size_t splats = WorldOptions{}.splat_count;
  int width = WorldOptions{}.width;
  int height = WorldOptions{}.height;
  std::uint64_t world_seed = WorldOptions{}.seed;
};

void add_world_options(CLI::App* cmd, WorldArgs& w) {
  cmd->add_option("--splats", w.splats, "Background splat count of the built-in world")->capture_default_str();
  cmd->add_option("--width", w.width, "Camera width in pixels")->capture_default_str();
  cmd->add_option("--height", w.height, "Camera height in pixels")->capture_default_str();
  cmd->add_option("--world-seed", w.world_seed, "Seed of the built-in world's splat layout")->capture_default_str();
}

LoadedScene world_from(const std::string& scene_path, const WorldArgs& w) {
  if (!scene_path.empty()) return load_scene_with_chain(scene_path);
  LoadedScene ls;
  WorldOptions opt;
  opt.splat_count = w.splats;
  opt.width = w.width;
  opt.height = w.height;
  opt.seed = w.world_seed;
  ls.scene = build_world(opt);
  ls.chain = franka_like_chain();
  return ls;
}

struct GenerateArgs {
  std::string task = "pick_drop", out, scene;
  std::size_t episodes = 1;
  std::uint64_t seed = 0;
  int workers = 1;
  int quality = 40;
  int max_attempts = 20;
  bool no_render = false;
  bool quiet = false;
  WorldArgs world;
};

int run_generate(const GenerateArgs& a) {
  const LoadedScene ls = world_from(a.scene, a.world);
  GenerateOptions opt;
  opt.task = resolve_task(a.task);
  opt.episodes = a.episodes;
  opt.seed = a.seed;
  opt.workers = a.workers;
  opt.out = a.out;
  opt.quality = a.quality;
  opt.render = !a.no_render;
  opt.max_attempts = a.max_attempts;
  if (!a.quiet) opt.progress = [](const std::string& line) { std::cerr << line << "\n"; };
  const GenerateReport r = generate_dataset(opt, ls.scene, ls.chain);
  std::cout << fmt::format("generated {} episodes of {} in {}\n", r.index.episodes.size(), to_string(opt.task.id),
                           a.out);
  std::cout << fmt::format("steps {}  frames {}  failed rollouts {}  wall {:.1f} s\n", r.total_steps, r.frames,
                           r.failed_rollouts, r.wall_seconds);
  return 0;
}

// ------------------------------------------------------------------ eval

struct EvalArgs {
  std::string episode, scene, task, json;
  std::vector<std::string> cameras;
  std::size_t stride = 1;
  bool per_frame = false;
};

int run_eval(const EvalArgs& a) {
  const LoadedScene ls = load_scene_with_chain(a.scene);
  const EpisodeRecord record = read_episode(a.episode, true);
  // The dataset root, one level up, carries the task and chain it was
  // generated with.
  const fs::path root = fs::path(a.episode).lexically_normal().parent_path();
  TaskSpec task;
  if (!a.task.empty()) {
    task = resolve_task(a.task);
  } else if (fs::is_regular_file(root / "task.json")) {
    task = load_task((root / "task.json").string());
  } else {
    task = default_task(task_id_from_string(record.task));
  }
  const KinematicChain chain =
      fs::is_regular_file(root / "robot.json") ? load_chain((root / "robot.json").string()) : ls.chain;
  ReplayCompareOptions opt;
  opt.cameras = a.cameras;
  opt.stride = a.stride;
  const MetricReport report = replay_compare(record, task, ls.scene, chain, opt);
  std::cout << format_metric_table(report, a.per_frame);
  const Json j = metric_report_to_json(report);
  if (a.json.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_json(j, a.json);
    std::cout << "wrote " << a.json << "\n";
  }
  return 0;
}

// ----------------------------------------------------------------- stats

struct StatsArgs {
  std::string dataset, out;
};

int run_stats(const StatsArgs& a) {
  const DatasetIndex index = read_index(a.dataset);
  const DatasetStats s = dataset_stats(index);
  write_stats(s, a.out);
  std::size_t total = 0;
  for (std::size_t n : s.episode_lengths) total += n;
  std::cout << fmt::format("{} episodes, {} steps, {} gripper angles, {} displacements, {} initial positions\n",
                           s.episode_lengths.size(), total, s.gripper_angles.size(), s.ee_displacements.size(),
                           s.initial_positions.size());
  std::cout << "wrote " << a.out << "\n";
  return 0;
}

// ----------------------------------------------------------------- bench

struct BenchArgs {
  std::string task = "pick_drop", scene, json;
  std::size_t steps = 100;
  std::uint64_t seed = 0;
  int quality = 40;
  WorldArgs world;
};

int run_bench(const BenchArgs& a) {
  const LoadedScene ls = world_from(a.scene, a.world);
  BenchOptions opt;
  opt.steps = a.steps;
  opt.seed = a.seed;
  opt.quality = a.quality;
  const TimingReport r = bench(ls.scene, ls.chain, resolve_task(a.task), opt);
  std::cout << format_timing_table(r);
  const Json j = timing_report_to_json(r);
  if (a.json.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_json(j, a.json);
    std::cout << "wrote " << a.json << "\n";
  }
  return 0;
}

// ----------------------------------------------------------- make-assets

struct AssetsArgs {
  std::string out;
  bool align_demo = false;
  std::uint64_t seed = 0;
  WorldArgs world;
};

// Writes the built-in world. With --align-demo a depth image of the
// background from the front camera and noisy marker correspondences are
// written next to it, ready for `align`.
int run_make_assets(const AssetsArgs& a) {
  LoadedScene ls = world_from("", a.world);
  const std::string manifest = write_world_assets(ls.scene, ls.chain, a.out);
  std::cout << "wrote " << manifest << "\n";
  if (!a.align_demo) return 0;

  const Pose truth = ls.scene.background.local_to_world;
  const CameraView& cam = ls.scene.camera(kFrontCamera);
  const RenderBuffers buf = rasterize_mesh(cam, {MeshInstance{&ls.scene.background_mesh, truth}});
  DepthImage depth(buf.width, buf.height);
  for (std::size_t i = 0; i < depth.depth.size(); ++i) depth.depth[i] = static_cast<float>(buf.depth[i]);
  const std::string depth_path = (fs::path(a.out) / "observed.depth").string();
  write_depth(depth, depth_path);

  // Marker corners on the table top, in the background frame, with the
  // world side measured under 3 mm noise so that ICP has work to do.
  Rng rng(a.seed);
  CorrespondenceSet marker;
  for (const Eigen::Vector3d& p : {Eigen::Vector3d(0.30, -0.05, 0.0), Eigen::Vector3d(0.40, -0.05, 0.0),
                                   Eigen::Vector3d(0.40, 0.05, 0.0), Eigen::Vector3d(0.30, 0.05, 0.0)}) {
    marker.source.push_back(p);
    marker.target.push_back(truth.apply(p) + 0.003 * Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal()));
  }
  const std::string marker_path = (fs::path(a.out) / "marker.txt").string();
  write_correspondences(marker, marker_path);
  std::cout << "wrote " << depth_path << "\n" << "wrote " << marker_path << "\n";
  std::cout << "true background pose: " << format_pose(truth) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Splat-based tabletop simulation: alignment, rendering, demonstration generation and evaluation"};
  app.require_subcommand(1);

  AlignArgs align;
  auto* c_align = app.add_subcommand("align", "Register the background to the world from a marker and a depth image");
  c_align->add_option("--scene", align.scene, "Scene manifest")->required()->check(CLI::ExistingFile);
  c_align->add_option("--depth", align.depth, "Observed depth image")->required()->check(CLI::ExistingFile);
  c_align->add_option("--marker", align.marker, "Marker correspondences (background -> world)")
      ->required()
      ->check(CLI::ExistingFile);
  c_align->add_option("--camera", align.camera, "Camera that observed the depth")->capture_default_str();
  c_align->add_flag("--no-icp", align.no_icp, "Use the marker estimate only");
  c_align->add_option("--out", align.out, "Updated manifest (default: overwrite --scene)");
  c_align->add_option("--seed", align.seed, "Seed for mesh sampling")->capture_default_str();
  c_align->add_option("--mesh-samples", align.mesh_samples, "Points sampled on the background mesh")
      ->capture_default_str();
  c_align->add_option("--depth-stride", align.depth_stride, "Depth pixel stride")->capture_default_str();

  RenderArgs render;
  auto* c_render = app.add_subcommand("render", "Render one camera of a scene with the robot at rest");
  c_render->add_option("--scene", render.scene, "Scene manifest")->required()->check(CLI::ExistingFile);
  c_render->add_option("--camera", render.camera, "Camera name")->capture_default_str();
  c_render->add_option("--out", render.out, "Output image (.png or .jpg)")->required();
  c_render->add_option("--joints", render.joints, "Comma-separated joint angles (default: home)");
  c_render->add_option("--quality", render.quality, "JPEG quality")->check(CLI::Range(1, 100))->capture_default_str();
  c_render->add_option("--depth-out", render.depth_out, "Also write the rendered depth");

  GenerateArgs gen;
  auto* c_gen = app.add_subcommand("generate", "Generate a rejection-sampled demonstration dataset");
  c_gen->add_option("--task", gen.task, "Task name or task JSON file")->capture_default_str();
  c_gen->add_option("--episodes", gen.episodes, "Successful episodes to write")->capture_default_str();
  c_gen->add_option("--seed", gen.seed, "Base seed")->capture_default_str();
  c_gen->add_option("--workers", gen.workers, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  c_gen->add_option("--out", gen.out, "Dataset root")->required();
  c_gen->add_option("--scene", gen.scene, "Scene manifest (default: built-in world)")->check(CLI::ExistingFile);
  c_gen->add_option("--quality", gen.quality, "JPEG quality, 0 = PNG")->check(CLI::Range(0, 100))
      ->capture_default_str();
  c_gen->add_option("--max-attempts", gen.max_attempts, "Rollouts per episode before aborting")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_gen->add_flag("--no-render", gen.no_render, "Write low-dimensional logs only");
  c_gen->add_flag("--quiet", gen.quiet, "No per-episode progress on stderr");
  add_world_options(c_gen, gen.world);

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "Compare stored frames against a re-render from the logged states");
  c_eval->add_option("--episode", eval.episode, "Episode directory")->required()->check(CLI::ExistingDirectory);
  c_eval->add_option("--scene", eval.scene, "Scene manifest")->required()->check(CLI::ExistingFile);
  c_eval->add_option("--task", eval.task, "Task name or JSON (default: <dataset>/task.json)");
  c_eval->add_option("--camera", eval.cameras, "Cameras to compare (default: all stored)");
  c_eval->add_option("--stride", eval.stride, "Compare every n-th step")->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_eval->add_flag("--per-frame", eval.per_frame, "One table row per frame");
  c_eval->add_option("--json", eval.json, "Write the JSON report here instead of stdout");

  StatsArgs stats;
  auto* c_stats = app.add_subcommand("stats", "Dataset statistics as TSV files");
  c_stats->add_option("--dataset", stats.dataset, "Dataset root")->required()->check(CLI::ExistingDirectory);
  c_stats->add_option("--out", stats.out, "Output directory")->required();

  BenchArgs bench_args;
  auto* c_bench = app.add_subcommand("bench", "Per-step timing breakdown of the generation loop");
  c_bench->add_option("--task", bench_args.task, "Task name or task JSON file")->capture_default_str();
  c_bench->add_option("--scene", bench_args.scene, "Scene manifest (default: built-in world)")
      ->check(CLI::ExistingFile);
  c_bench->add_option("--steps", bench_args.steps, "Minimum persisted steps")->capture_default_str();
  c_bench->add_option("--seed", bench_args.seed, "Rollout seed")->capture_default_str();
  c_bench->add_option("--quality", bench_args.quality, "JPEG quality, 0 = PNG")->check(CLI::Range(0, 100))
      ->capture_default_str();
  c_bench->add_option("--json", bench_args.json, "Write the JSON report here instead of stdout");
  add_world_options(c_bench, bench_args.world);

  AssetsArgs assets;
  auto* c_assets = app.add_subcommand("make-assets", "Write the built-in world as a scene directory");
  c_assets->add_option("--out", assets.out, "Output directory")->required();
  c_assets->add_flag("--align-demo", assets.align_demo, "Also write a depth image and noisy marker correspondences");
  c_assets->add_option("--seed", assets.seed, "Seed of the --align-demo marker noise")->capture_default_str();
  add_world_options(c_assets, assets.world);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", e.what());
    std::cerr << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitUsage;
  }

  try {
    if (c_align->parsed()) return run_align(align);
    if (c_render->parsed()) return run_render(render);
    if (c_gen->parsed()) return run_generate(gen);
    if (c_eval->parsed()) return run_eval(eval);
    if (c_stats->parsed()) return run_stats(stats);
    if (c_bench->parsed()) return run_bench(bench_args);
    if (c_assets->parsed()) return run_make_assets(assets);
  } catch (const Error& e) {
    report_error(category_name(e.category()), e.what());
    return exit_code(e.category());
  } catch (const std::exception& e) {
    report_error("internal", e.what());
    return 1;
  }
  return kExitUsage;
}
