#include "splatsim/dataset/episode_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "splatsim/core/error.hpp"
#include "splatsim/core/image_io.hpp"
#include "splatsim/eval/metrics.hpp"

namespace splatsim {

static_assert(std::endian::native == std::endian::little, "lowdim.bin is written in host byte order");

namespace fs = std::filesystem;

void EpisodeRecord::validate() const {
  if (!(dt > 0.0)) throw invalid_argument("episode dt must be positive");
  const int n = dof();
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const EpisodeStep& s = steps[k];
    if (static_cast<int>(s.joints.size()) != n || static_cast<int>(s.action_joints.size()) != n) {
      throw invalid_argument(fmt::format("episode step {}: joint vectors must have {} entries", k, n));
    }
    if (s.object_poses.size() != object_ids.size()) {
      throw invalid_argument(fmt::format("episode step {}: expected {} object poses, got {}", k, object_ids.size(),
                                         s.object_poses.size()));
    }
    if (std::abs(s.t - static_cast<double>(k) * dt) > 1e-9 * (1.0 + s.t)) {
      throw invalid_argument(fmt::format("episode step {}: timestamp {} is not {} * dt", k, s.t, k));
    }
    if (!s.joints.allFinite() || !s.action_joints.allFinite() || !std::isfinite(s.gripper) ||
        !std::isfinite(s.action_gripper)) {
      throw invalid_argument(fmt::format("episode step {}: non-finite value", k));
    }
  }
  for (const auto& [cam, images] : frames) {
    if (images.size() != steps.size()) {
      throw invalid_argument(
          fmt::format("camera '{}' has {} frames for {} steps", cam, images.size(), steps.size()));
    }
  }
}

namespace {

constexpr const char* kLowdimMagic = "SPLATSIM_LOWDIM 1";
constexpr const char* kIndexMagic = "splatsim_dataset 1";

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io_error(fmt::format("cannot create directory '{}': {}", dir, ec.message()));
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw io_error(fmt::format("cannot open '{}' for writing", path));
  return out;
}

void check_written(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw io_error(fmt::format("write failed for '{}'", path));
}

// Bypasses the normalizing constructor so stored values round trip bit for bit.
Pose exact_pose(const Eigen::Quaterniond& q, const Eigen::Vector3d& t) {
  Pose p;
  p.rotation = q;
  p.translation = t;
  return p;
}

std::string pose_string(const Pose& p) {
  return fmt::format("{} {} {} {} {} {} {}", p.rotation.w(), p.rotation.x(), p.rotation.y(), p.rotation.z(), p.translation.x(), p.translation.y(), p.translation.z());
}

double parse_double(const std::string& text, const std::string& path, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0') throw ParseError(path, ParseError::Unit::line, line, "expected a number, got '" + text + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& text, const std::string& path, std::size_t line) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (text.empty() || *end != '\0' || text[0] == '-') {
    throw ParseError(path, ParseError::Unit::line, line, "expected an unsigned integer, got '" + text + "'");
  }
  return v;
}

Pose parse_pose(const std::string& text, const std::string& path, std::size_t line) {
  std::istringstream in(text);
  double v[7];
  for (double& x : v) {
    std::string tok;
    if (!(in >> tok)) throw ParseError(path, ParseError::Unit::line, line, "pose needs 7 numbers");
    x = parse_double(tok, path, line);
  }
  Eigen::Quaterniond q(v[0], v[1], v[2], v[3]);
  if (std::abs(q.norm() - 1.0) > 1e-6) throw ParseError(path, ParseError::Unit::line, line, "pose quaternion is not unit");
  return exact_pose(q, Eigen::Vector3d(v[4], v[5], v[6]));
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// key = value lines; '#' starts a comment line.
struct KeyValues {
  std::string path;
  std::map<std::string, std::pair<std::string, std::size_t>> entries;

  const std::string& get(const std::string& key, std::size_t* line = nullptr) const {
    auto it = entries.find(key);
    if (it == entries.end()) throw ParseError(path, ParseError::Unit::line, 1, "missing key '" + key + "'");
    if (line) *line = it->second.second;
    return it->second.first;
  }
  double number(const std::string& key) const {
    std::size_t line = 0;
    const std::string& v = get(key, &line);
    return parse_double(v, path, line);
  }
  std::uint64_t unsigned_value(const std::string& key) const {
    std::size_t line = 0;
    const std::string& v = get(key, &line);
    return parse_u64(v, path, line);
  }
};

KeyValues read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::not_found, fmt::format("cannot open '{}'", path));
  KeyValues kv{path, {}};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(path, ParseError::Unit::line, number, "expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    if (!kv.entries.emplace(key, std::make_pair(trim(t.substr(eq + 1)), number)).second) {
      throw ParseError(path, ParseError::Unit::line, number, "duplicate key '" + key + "'");
    }
  }
  return kv;
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

struct ArraySpec {
  std::string name;
  std::vector<std::size_t> shape;
  std::size_t count() const {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
  }
};

std::vector<ArraySpec> lowdim_layout(std::size_t n, std::size_t dof, std::size_t objects) {
  return {{"t", {n}},
          {"joints", {n, dof}},
          {"gripper", {n}},
          {"action_joints", {n, dof}},
          {"action_gripper", {n}},
          {"object_poses", {n, objects, 7}}};
}

void write_lowdim(const EpisodeRecord& r, const std::string& path) {
  const std::size_t n = r.steps.size(), dof = static_cast<std::size_t>(r.dof()), m = r.object_ids.size();
  std::vector<double> data;
  data.reserve(n * (3 + 2 * dof + 7 * m));
  for (const auto& s : r.steps) data.push_back(s.t);
  for (const auto& s : r.steps) data.insert(data.end(), s.joints.data(), s.joints.data() + dof);
  for (const auto& s : r.steps) data.push_back(s.gripper);
  for (const auto& s : r.steps) data.insert(data.end(), s.action_joints.data(), s.action_joints.data() + dof);
  for (const auto& s : r.steps) data.push_back(s.action_gripper);
  for (const auto& s : r.steps) {
    for (const Pose& p : s.object_poses) {
      data.insert(data.end(), {p.rotation.w(), p.rotation.x(), p.rotation.y(), p.rotation.z(), p.translation.x(), p.translation.y(), p.translation.z()});
    }
  }
  std::ofstream out = open_out(path, std::ios::out | std::ios::binary);
  out << kLowdimMagic << "\n" << "steps " << n << "\n" << "dof " << dof << "\n" << "objects " << m << "\n";
  for (const ArraySpec& a : lowdim_layout(n, dof, m)) {
    out << "array " << a.name << " float64";
    for (std::size_t d : a.shape) out << ' ' << d;
    out << "\n";
  }
  out << "end_header\n";
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
  check_written(out, path);
}

void read_lowdim(EpisodeRecord& r, const std::string& path) {
  const Bytes bytes = [&] {
    if (!fs::exists(path)) throw Error(ErrorCategory::not_found, fmt::format("missing low-dimensional log '{}'", path));
    return read_bytes(path);
  }();
  std::size_t pos = 0, line_no = 0;
  auto next_line = [&]() {
    const auto* begin = bytes.data() + pos;
    const auto* nl = static_cast<const std::uint8_t*>(std::memchr(begin, '\n', bytes.size() - pos));
    if (!nl) throw ParseError(path, ParseError::Unit::line, line_no + 1, "unterminated header");
    std::string line(reinterpret_cast<const char*>(begin), static_cast<std::size_t>(nl - begin));
    pos = static_cast<std::size_t>(nl - bytes.data()) + 1;
    ++line_no;
    return line;
  };
  if (next_line() != kLowdimMagic) throw ParseError(path, ParseError::Unit::line, 1, "not a lowdim log");
  std::map<std::string, std::size_t> dims;
  std::vector<ArraySpec> arrays;
  for (;;) {
    const std::string line = next_line();
    if (line == "end_header") break;
    const auto words = split_words(line);
    if (words.size() == 2) {
      dims[words[0]] = parse_u64(words[1], path, line_no);
    } else if (words.size() >= 4 && words[0] == "array" && words[2] == "float64") {
      ArraySpec a{words[1], {}};
      for (std::size_t i = 3; i < words.size(); ++i) a.shape.push_back(parse_u64(words[i], path, line_no));
      arrays.push_back(a);
    } else {
      throw ParseError(path, ParseError::Unit::line, line_no, "unrecognized header line '" + line + "'");
    }
  }
  for (const char* key : {"steps", "dof", "objects"}) {
    if (!dims.count(key)) throw ParseError(path, ParseError::Unit::line, line_no, std::string("header lacks '") + key + "'");
  }
  const std::size_t n = dims["steps"], dof = dims["dof"], m = dims["objects"];
  const auto expected = lowdim_layout(n, dof, m);
  if (arrays.size() != expected.size()) throw ParseError(path, ParseError::Unit::line, line_no, "unexpected array list");
  std::size_t total = 0;
  for (std::size_t i = 0; i < arrays.size(); ++i) {
    if (arrays[i].name != expected[i].name || arrays[i].shape != expected[i].shape) {
      throw ParseError(path, ParseError::Unit::line, line_no,
                       fmt::format("array '{}' does not match the declared dimensions", arrays[i].name));
    }
    total += arrays[i].count();
  }
  if (bytes.size() - pos != total * sizeof(double)) {
    throw ParseError(path, ParseError::Unit::byte, bytes.size(),
                     fmt::format("payload holds {} bytes, header declares {}", bytes.size() - pos, total * sizeof(double)));
  }
  if (m != r.object_ids.size()) {
    throw ParseError(path, ParseError::Unit::line, 4, fmt::format("{} objects, metadata lists {}", m, r.object_ids.size()));
  }
  std::vector<double> data(total);
  std::memcpy(data.data(), bytes.data() + pos, total * sizeof(double));
  const double* p = data.data();
  r.steps.assign(n, EpisodeStep{});
  for (auto& s : r.steps) s.t = *p++;
  for (auto& s : r.steps) {
    s.joints = Eigen::Map<const Eigen::VectorXd>(p, static_cast<Eigen::Index>(dof));
    p += dof;
  }
  for (auto& s : r.steps) s.gripper = *p++;
  for (auto& s : r.steps) {
    s.action_joints = Eigen::Map<const Eigen::VectorXd>(p, static_cast<Eigen::Index>(dof));
    p += dof;
  }
  for (auto& s : r.steps) s.action_gripper = *p++;
  for (auto& s : r.steps) {
    s.object_poses.resize(m);
    for (Pose& pose : s.object_poses) {
      pose = exact_pose(Eigen::Quaterniond(p[0], p[1], p[2], p[3]), Eigen::Vector3d(p[4], p[5], p[6]));
      p += 7;
    }
  }
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

void check_name(const std::string& name, const char* what) {
  if (name.empty() || name.find_first_of(" \t\r\n=/") != std::string::npos) {
    throw invalid_argument(fmt::format("{} '{}' must be non-empty without whitespace, '=' or '/'", what, name));
  }
}

}  // namespace

std::string frame_path(const std::string& episode_dir, const std::string& camera, std::size_t step, int quality) {
  return (fs::path(episode_dir) / "frames" / camera / fmt::format("{}.{}", step, quality == 0 ? "png" : "jpg")).string();
}

EpisodeManifest write_episode(const EpisodeRecord& record, const std::string& dir, int quality) {
  if (quality < 0 || quality > 100) throw invalid_argument(fmt::format("quality must be in [0, 100], got {}", quality));
  record.validate();
  check_name(record.task, "task id");
  for (const auto& id : record.object_ids) check_name(id, "object id");
  for (const auto& [key, value] : record.randomization) check_name(key, "randomization key");
  ensure_directory(dir);

  EpisodeManifest manifest;
  manifest.dir = dir;
  manifest.quality = quality;
  manifest.steps = record.steps.size();
  double psnr_sum = 0.0;
  for (const auto& [cam, images] : record.frames) {
    check_name(cam, "camera name");
    manifest.cameras.push_back(cam);
    ensure_directory((fs::path(dir) / "frames" / cam).string());
    for (std::size_t k = 0; k < images.size(); ++k) {
      const Image8& img = images[k];
      const Bytes bytes = quality == 0 ? encode_png(img) : encode_jpeg(img, quality);
      const std::string path = frame_path(dir, cam, k, quality);
      write_bytes(bytes, path);
      manifest.compression.frames += 1;
      manifest.compression.raw_bytes += img.data.size();
      manifest.compression.encoded_bytes += bytes.size();
      psnr_sum += quality == 0 ? kPsnrCap : psnr(img, decode_jpeg(bytes, path));
    }
  }
  if (manifest.compression.frames > 0) manifest.compression.mean_psnr = psnr_sum / manifest.compression.frames;

  write_lowdim(record, (fs::path(dir) / "lowdim.bin").string());

  const std::string meta_path = (fs::path(dir) / "meta.txt").string();
  std::ofstream meta = open_out(meta_path);
  meta << "task = " << record.task << "\n";
  meta << "seed = " << record.seed << "\n";
  meta << "success = " << (record.success ? 1 : 0) << "\n";
  meta << "dt = " << fmt::format("{}", record.dt) << "\n";
  meta << "steps = " << record.steps.size() << "\n";
  meta << "robot_base = " << pose_string(record.robot_base) << "\n";
  meta << "objects = " << join(record.object_ids) << "\n";
  meta << "cameras = " << join(manifest.cameras) << "\n";
  meta << "image_format = " << (quality == 0 ? "png" : "jpg") << "\n";
  meta << "quality = " << quality << "\n";
  meta << "compression_frames = " << manifest.compression.frames << "\n";
  meta << "compression_raw_bytes = " << manifest.compression.raw_bytes << "\n";
  meta << "compression_encoded_bytes = " << manifest.compression.encoded_bytes << "\n";
  meta << "compression_ratio = " << fmt::format("{:.4f}", manifest.compression.ratio()) << "\n";
  meta << "compression_mean_psnr = " << fmt::format("{:.4f}", manifest.compression.mean_psnr) << "\n";
  for (const auto& [key, value] : record.randomization) meta << "randomization." << key << " = " << fmt::format("{}", value) << "\n";
  check_written(meta, meta_path);
  return manifest;
}

EpisodeRecord read_episode(const std::string& dir, bool load_frames) {
  const std::string meta_path = (fs::path(dir) / "meta.txt").string();
  if (!fs::exists(meta_path)) throw Error(ErrorCategory::not_found, fmt::format("'{}' is not an episode directory (no meta.txt)", dir));
  const KeyValues kv = read_key_values(meta_path);
  EpisodeRecord r;
  r.task = kv.get("task");
  r.seed = kv.unsigned_value("seed");
  r.success = kv.unsigned_value("success") != 0;
  r.dt = kv.number("dt");
  std::size_t line = 0;
  const std::string& base = kv.get("robot_base", &line);
  r.robot_base = parse_pose(base, meta_path, line);
  r.object_ids = split_words(kv.get("objects"));
  const int quality = static_cast<int>(kv.unsigned_value("quality"));
  for (const auto& [key, entry] : kv.entries) {
    constexpr std::string_view prefix = "randomization.";
    if (key.compare(0, prefix.size(), prefix) == 0) {
      r.randomization[key.substr(prefix.size())] = parse_double(entry.first, meta_path, entry.second);
    }
  }
  read_lowdim(r, (fs::path(dir) / "lowdim.bin").string());
  if (r.steps.size() != kv.unsigned_value("steps")) {
    throw ParseError(meta_path, ParseError::Unit::line, kv.entries.at("steps").second, "step count disagrees with lowdim.bin");
  }
  if (load_frames) {
    for (const std::string& cam : split_words(kv.get("cameras"))) {
      auto& images = r.frames[cam];
      images.reserve(r.steps.size());
      for (std::size_t k = 0; k < r.steps.size(); ++k) {
        const std::string path = frame_path(dir, cam, k, quality);
        const std::string context = fmt::format("camera '{}' step {} ({})", cam, k, path);
        if (!fs::exists(path)) throw Error(ErrorCategory::not_found, "missing frame: " + context);
        const Bytes bytes = read_bytes(path);
        images.push_back(quality == 0 ? decode_png(bytes, context) : decode_jpeg(bytes, context));
      }
    }
  }
  return r;
}

std::string DatasetIndex::episode_dir(std::size_t i) const { return (fs::path(root) / episodes.at(i)).string(); }

std::string episode_dir_name(std::size_t index) { return fmt::format("ep_{}", index); }

void write_index(const DatasetIndex& index) {
  ensure_directory(index.root);
  check_name(index.task, "task id");
  const std::string path = (fs::path(index.root) / "index.txt").string();
  std::ofstream out = open_out(path);
  out << kIndexMagic << "\n";
  out << "task " << index.task << "\n";
  out << "base_seed " << index.base_seed << "\n";
  out << "quality " << index.quality << "\n";
  out << "failed_rollouts " << index.failed_rollouts << "\n";
  out << "episodes " << index.episodes.size() << "\n";
  for (const auto& e : index.episodes) out << "episode " << e << "\n";
  check_written(out, path);
}

DatasetIndex read_index(const std::string& root) {
  const std::string path = (fs::path(root) / "index.txt").string();
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::not_found, fmt::format("no dataset index at '{}'", path));
  DatasetIndex index;
  index.root = root;
  std::string line;
  std::size_t number = 0, declared = 0;
  bool have_count = false;
  while (std::getline(in, line)) {
    ++number;
    const auto words = split_words(line);
    if (words.empty()) continue;
    if (number == 1) {
      if (trim(line) != kIndexMagic) throw ParseError(path, ParseError::Unit::line, 1, "not a dataset index");
      continue;
    }
    if (words.size() != 2) throw ParseError(path, ParseError::Unit::line, number, "expected '<key> <value>'");
    const std::string& key = words[0];
    const std::string& value = words[1];
    if (key == "task") index.task = value;
    else if (key == "base_seed") index.base_seed = parse_u64(value, path, number);
    else if (key == "quality") index.quality = static_cast<int>(parse_u64(value, path, number));
    else if (key == "failed_rollouts") index.failed_rollouts = parse_u64(value, path, number);
    else if (key == "episodes") {
      declared = parse_u64(value, path, number);
      have_count = true;
    } else if (key == "episode") {
      if (!fs::exists(fs::path(root) / value / "meta.txt")) {
        throw ParseError(path, ParseError::Unit::line, number, fmt::format("episode directory '{}' is missing", value));
      }
      index.episodes.push_back(value);
    } else {
      throw ParseError(path, ParseError::Unit::line, number, "unknown key '" + key + "'");
    }
  }
  if (number == 0) throw ParseError(path, ParseError::Unit::line, 1, "empty index");
  if (!have_count || declared != index.episodes.size()) {
    throw ParseError(path, ParseError::Unit::line, number, "episode count does not match the listed episodes");
  }
  return index;
}

}  // namespace splatsim
