#include "splatsim/core/splat_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "splatsim/core/error.hpp"
#include "splatsim/core/ply.hpp"

namespace splatsim {

namespace {

constexpr std::array<const char*, 14> kRequired = {"x",       "y",       "z",       "f_dc_0", "f_dc_1",
                                                   "f_dc_2",  "opacity", "scale_0", "scale_1", "scale_2",
                                                   "rot_0",   "rot_1",   "rot_2",   "rot_3"};

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

GaussianCloud load_gaussian_cloud(const std::string& path) {
  const ply::File file = ply::read(path);
  const ply::Element* vertex = file.find("vertex");
  if (vertex == nullptr) throw Error(ErrorCategory::parse, path + ": splat file has no 'vertex' element");

  std::array<const std::vector<double>*, kRequired.size()> cols{};
  for (std::size_t k = 0; k < kRequired.size(); ++k) {
    const ply::Property* p = vertex->find(kRequired[k]);
    if (p == nullptr || p->is_list) {
      throw Error(ErrorCategory::parse, fmt::format("{}: splat file is missing attribute '{}'", path, kRequired[k]));
    }
    cols[k] = &p->values;
  }

  GaussianCloud cloud;
  cloud.primitives.reserve(vertex->count);
  for (std::size_t i = 0; i < vertex->count; ++i) {
    std::array<double, kRequired.size()> v{};
    for (std::size_t k = 0; k < kRequired.size(); ++k) {
      v[k] = (*cols[k])[i];
      if (!std::isfinite(v[k])) {
        throw Error(ErrorCategory::parse,
                    fmt::format("{}: non-finite value for '{}' at point {}", path, kRequired[k], i));
      }
    }
    GaussianPrimitive g;
    g.mean = {v[0], v[1], v[2]};
    for (int c = 0; c < 3; ++c) g.color[c] = std::clamp(0.5 + kShC0 * v[3 + c], 0.0, 1.0);
    g.opacity = std::clamp(logistic(v[6]), 1e-12, 1.0 - 1e-12);
    g.scale = {std::exp(v[7]), std::exp(v[8]), std::exp(v[9])};
    const Eigen::Quaterniond q(v[10], v[11], v[12], v[13]);
    if (q.norm() < 1e-12) throw Error(ErrorCategory::parse, fmt::format("{}: zero rotation at point {}", path, i));
    g.rotation = q.normalized();
    if (!g.scale.allFinite() || (g.scale.array() <= 0.0).any()) {
      throw Error(ErrorCategory::parse, fmt::format("{}: scale overflow at point {}", path, i));
    }
    cloud.primitives.push_back(g);
  }
  return cloud;
}

void save_gaussian_cloud(const GaussianCloud& cloud, const std::string& path) {
  ply::File file;
  file.format = ply::Format::binary_little_endian;
  ply::Element vertex;
  vertex.name = "vertex";
  vertex.count = cloud.size();
  const char* names[] = {"x", "y", "z", "nx", "ny", "nz", "f_dc_0", "f_dc_1", "f_dc_2", "opacity",
                         "scale_0", "scale_1", "scale_2", "rot_0", "rot_1", "rot_2", "rot_3"};
  for (const char* n : names) {
    ply::Property p;
    p.name = n;
    p.type = ply::Type::float32;
    p.values.reserve(cloud.size());
    vertex.properties.push_back(std::move(p));
  }
  for (const auto& g : cloud.primitives) {
    g.validate();
    const Eigen::Quaterniond q = g.rotation.normalized();
    const double row[] = {g.mean.x(),
                          g.mean.y(),
                          g.mean.z(),
                          0.0,
                          0.0,
                          0.0,
                          (g.color.x() - 0.5) / kShC0,
                          (g.color.y() - 0.5) / kShC0,
                          (g.color.z() - 0.5) / kShC0,
                          std::log(g.opacity / (1.0 - g.opacity)),
                          std::log(g.scale.x()),
                          std::log(g.scale.y()),
                          std::log(g.scale.z()),
                          q.w(),
                          q.x(),
                          q.y(),
                          q.z()};
    for (std::size_t k = 0; k < std::size(row); ++k) vertex.properties[k].values.push_back(row[k]);
  }
  file.elements.push_back(std::move(vertex));
  ply::write(file, path);
}

}  // namespace splatsim
