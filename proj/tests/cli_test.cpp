#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "splatsim/core/image_io.hpp"
#include "splatsim/core/json_util.hpp"
#include "splatsim/core/manifest.hpp"
#include "splatsim/dataset/episode_io.hpp"
#include "test_util.hpp"

using namespace splatsim;
using namespace splatsim::testing;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the CLI with `args`, capturing stdout and stderr through files.
Run cli(const TempDir& dir, const std::string& args) {
  static int counter = 0;
  const std::string tag = std::to_string(counter++);
  const std::string out = dir.file("stdout_" + tag), err = dir.file("stderr_" + tag);
  const std::string cmd = std::string(SPLATSIM_CLI) + " " + args + " >" + out + " 2>" + err;
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

const std::string kSmallWorld = " --splats 3000 --width 160 --height 120";

}  // namespace

TEST_CASE("render writes an image of the wrist camera") {
  TempDir dir("cli_render");
  REQUIRE(cli(dir, "make-assets --out " + dir.file("world") + kSmallWorld).code == 0);
  const Run r = cli(dir, "render --scene " + dir.file("world/scene.json") + " --camera wrist --out " + dir.file("img.png"));
  REQUIRE(r.code == 0);
  const Image8 img = read_image(dir.file("img.png"));
  CHECK(img.width == 160);
  CHECK(img.height == 120);
}

TEST_CASE("errors carry a machine-readable category and exit code") {
  TempDir dir("cli_errors");
  REQUIRE(cli(dir, "make-assets --out " + dir.file("world") + kSmallWorld).code == 0);
  const std::string scene = dir.file("world/scene.json");

  const Run unknown_flag = cli(dir, "render --scene " + scene + " --out x.png --bogus 1");
  CHECK(unknown_flag.code == 2);
  CHECK(unknown_flag.err.rfind("error category=usage message=", 0) == 0);

  const Run no_command = cli(dir, "");
  CHECK(no_command.code == 2);

  const Run bad_camera = cli(dir, "render --scene " + scene + " --camera nope --out " + dir.file("x.png"));
  CHECK(bad_camera.code == 4);
  CHECK(bad_camera.err.rfind("error category=not_found message=", 0) == 0);

  const Run bad_task = cli(dir, "generate --task juggling --episodes 1 --out " + dir.file("g") + kSmallWorld);
  CHECK(bad_task.code == 3);
  CHECK(bad_task.err.find("category=invalid_argument") != std::string::npos);
}

TEST_CASE("generate twice with the same seed writes identical low-dimensional logs") {
  TempDir dir("cli_generate");
  const std::string args = "generate --task pick_drop --episodes 3 --seed 7 --quiet" + kSmallWorld + " --out ";
  REQUIRE(cli(dir, args + dir.file("a")).code == 0);
  REQUIRE(cli(dir, args + dir.file("b")).code == 0);
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string ep = episode_dir_name(i);
    const std::string a = slurp(dir.file("a/" + ep + "/lowdim.bin"));
    CHECK(!a.empty());
    CHECK(a == slurp(dir.file("b/" + ep + "/lowdim.bin")));
    CHECK(slurp(dir.file("a/" + ep + "/meta.txt")) == slurp(dir.file("b/" + ep + "/meta.txt")));
    CHECK(slurp(dir.file("a/" + ep + "/frames/front/0.jpg")) == slurp(dir.file("b/" + ep + "/frames/front/0.jpg")));
  }
  // A different seed changes the layouts.
  REQUIRE(cli(dir, "generate --task pick_drop --episodes 1 --seed 8 --quiet --no-render" + kSmallWorld + " --out " +
                       dir.file("c"))
              .code == 0);
  CHECK(slurp(dir.file("a/ep_0/lowdim.bin")) != slurp(dir.file("c/ep_0/lowdim.bin")));

  SUBCASE("eval emits a metric table and its JSON twin") {
    const Run r = cli(dir, "eval --episode " + dir.file("a/ep_0") + " --scene " + dir.file("a/scene/scene.json") +
                               " --stride 8 --json " + dir.file("eval.json"));
    REQUIRE(r.code == 0);
    CHECK(r.out.find("synthetic replay") != std::string::npos);
    CHECK(r.out.find("PSNR dB") != std::string::npos);
    CHECK(r.out.find("\nall ") != std::string::npos);
    const Json j = read_json(dir.file("eval.json"));
    CHECK(j.at("count").get<std::size_t>() > 0);
    CHECK(j.at("psnr").at("mean").get<double>() >= 30.0);
  }

  SUBCASE("stats writes the distribution tables") {
    const Run r = cli(dir, "stats --dataset " + dir.file("a") + " --out " + dir.file("stats"));
    REQUIRE(r.code == 0);
    for (const char* f : {"episode_lengths.tsv", "gripper_angles.tsv", "ee_displacements.tsv", "initial_positions.tsv"}) {
      CHECK(std::filesystem::is_regular_file(dir.path() / "stats" / f));
    }
  }
}

TEST_CASE("align recovers the background pose from depth and a noisy marker") {
  TempDir dir("cli_align");
  REQUIRE(cli(dir, "make-assets --align-demo --seed 3 --out " + dir.file("world") + kSmallWorld).code == 0);
  const std::string w = dir.file("world");
  const std::string common =
      "align --scene " + w + "/scene.json --depth " + w + "/observed.depth --marker " + w + "/marker.txt";
  REQUIRE(cli(dir, common + " --no-icp --out " + dir.file("coarse.json")).code == 0);
  const Run r = cli(dir, common + " --seed 5 --out " + dir.file("fine.json"));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("residual") != std::string::npos);

  const Pose truth;  // the built-in world's background sits at the origin
  const Pose coarse = load_manifest(dir.file("coarse.json")).background_pose;
  const Pose fine = load_manifest(dir.file("fine.json")).background_pose;
  CHECK(pose_difference(coarse, truth) > 3e-3);
  CHECK(pose_difference(fine, truth) < 1e-3);
  // Asset paths stay valid from the new manifest location.
  CHECK(cli(dir, "render --scene " + dir.file("fine.json") + " --out " + dir.file("f.png")).code == 0);

  // Same seed, same result.
  REQUIRE(cli(dir, common + " --seed 5 --out " + dir.file("fine2.json")).code == 0);
  CHECK(slurp(dir.file("fine.json")) == slurp(dir.file("fine2.json")));
}

TEST_CASE("bench prints the breakdown, the reference row and a JSON twin") {
  TempDir dir("cli_bench");
  const Run r = cli(dir, "bench --steps 20 --seed 1 --json " + dir.file("bench.json") + kSmallWorld);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("26.64") != std::string::npos);
  CHECK(r.out.find("41.46") != std::string::npos);
  const Json j = read_json(dir.file("bench.json"));
  CHECK(j.at("steps").get<std::size_t>() >= 20);
}
