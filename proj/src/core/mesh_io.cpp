#include "splatsim/core/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "splatsim/core/error.hpp"
#include "splatsim/core/ply.hpp"

namespace splatsim {

namespace {

std::string lower_extension(const std::string& path) {
  std::string ext = std::filesystem::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

bool parse_double(std::string_view s, double& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_long(std::string_view s, long& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

TriangleMesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "' for reading");
  TriangleMesh mesh;
  std::vector<Eigen::Vector3d> colors;
  std::vector<Eigen::Vector3d> obj_normals;
  std::vector<long> vertex_normal;  // index into obj_normals per vertex, -1 if none
  bool any_color = false;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) { throw ParseError(path, ParseError::Unit::line, line_no, what); };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tag == "v") {
      if (tok.size() != 3 && tok.size() != 4 && tok.size() != 6 && tok.size() != 7) fail("vertex needs 3 coordinates (+ optional rgb)");
      double c[6] = {0, 0, 0, 0, 0, 0};
      const std::size_t ncoord = tok.size() >= 6 ? 6 : 3;
      for (std::size_t k = 0; k < ncoord; ++k) {
        if (!parse_double(tok[k], c[k])) fail("invalid number '" + tok[k] + "'");
      }
      mesh.vertices.emplace_back(c[0], c[1], c[2]);
      if (ncoord == 6) any_color = true;
      colors.emplace_back(c[3], c[4], c[5]);
      vertex_normal.push_back(-1);
    } else if (tag == "vn") {
      if (tok.size() != 3) fail("normal needs 3 components");
      double c[3];
      for (int k = 0; k < 3; ++k) {
        if (!parse_double(tok[k], c[k])) fail("invalid number '" + tok[k] + "'");
      }
      obj_normals.emplace_back(c[0], c[1], c[2]);
    } else if (tag == "f") {
      if (tok.size() < 3) fail("face needs at least 3 vertices");
      std::vector<std::uint32_t> idx;
      for (const auto& t : tok) {
        const auto slash = t.find('/');
        long v = 0;
        if (!parse_long(std::string_view(t).substr(0, slash), v)) fail("invalid face index '" + t + "'");
        const long n = static_cast<long>(mesh.vertices.size());
        const long resolved = v < 0 ? n + v : v - 1;
        if (v == 0 || resolved < 0 || resolved >= n) {
          fail(fmt::format("face index {} out of range (have {} vertices)", v, n));
        }
        // v/vt/vn or v//vn carries a normal index after the second slash.
        const auto last = t.rfind('/');
        if (std::count(t.begin(), t.end(), '/') == 2 && last + 1 < t.size()) {
          long vn = 0;
          if (parse_long(std::string_view(t).substr(last + 1), vn)) {
            const long nn = static_cast<long>(obj_normals.size());
            const long rn = vn < 0 ? nn + vn : vn - 1;
            if (rn >= 0 && rn < nn) vertex_normal[resolved] = rn;
          }
        }
        idx.push_back(static_cast<std::uint32_t>(resolved));
      }
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) mesh.faces.push_back({idx[0], idx[k], idx[k + 1]});
    }
    // Texture coordinates, groups, materials and smoothing flags are ignored.
  }
  if (any_color) mesh.colors = std::move(colors);
  if (!obj_normals.empty() &&
      std::all_of(vertex_normal.begin(), vertex_normal.end(), [](long n) { return n >= 0; })) {
    mesh.normals.reserve(mesh.vertices.size());
    for (long n : vertex_normal) mesh.normals.push_back(obj_normals[n].normalized());
  }
  return mesh;
}

TriangleMesh load_ply_mesh(const std::string& path) {
  const ply::File file = ply::read(path);
  const ply::Element* vertex = file.find("vertex");
  if (vertex == nullptr) throw Error(ErrorCategory::parse, path + ": PLY has no vertex element");
  const ply::Property* px = vertex->find("x");
  const ply::Property* py = vertex->find("y");
  const ply::Property* pz = vertex->find("z");
  if (!px || !py || !pz) throw Error(ErrorCategory::parse, path + ": PLY vertex element lacks x/y/z");
  TriangleMesh mesh;
  mesh.vertices.reserve(vertex->count);
  for (std::size_t i = 0; i < vertex->count; ++i) mesh.vertices.emplace_back(px->values[i], py->values[i], pz->values[i]);

  const ply::Property* r = vertex->find("red");
  const ply::Property* g = vertex->find("green");
  const ply::Property* b = vertex->find("blue");
  if (r && g && b) {
    const double scale = (r->type == ply::Type::uint8) ? 1.0 / 255.0 : 1.0;
    for (std::size_t i = 0; i < vertex->count; ++i) {
      mesh.colors.emplace_back(r->values[i] * scale, g->values[i] * scale, b->values[i] * scale);
    }
  }
  const ply::Property* nx = vertex->find("nx");
  const ply::Property* ny = vertex->find("ny");
  const ply::Property* nz = vertex->find("nz");
  if (nx && ny && nz) {
    for (std::size_t i = 0; i < vertex->count; ++i) {
      mesh.normals.emplace_back(Eigen::Vector3d(nx->values[i], ny->values[i], nz->values[i]).normalized());
    }
  }

  if (const ply::Element* face = file.find("face")) {
    const ply::Property* list = face->find("vertex_indices");
    if (list == nullptr) list = face->find("vertex_index");
    if (list == nullptr || !list->is_list) throw Error(ErrorCategory::parse, path + ": PLY face element lacks vertex_indices");
    const auto n = static_cast<std::int64_t>(mesh.vertices.size());
    for (std::size_t f = 0; f < face->count; ++f) {
      const auto begin = list->list_offsets[f], end = list->list_offsets[f + 1];
      if (end - begin < 3) {
        throw Error(ErrorCategory::parse, fmt::format("{}: face {} has fewer than 3 vertices", path, f));
      }
      for (auto k = begin; k < end; ++k) {
        if (list->list_values[k] < 0 || list->list_values[k] >= n) {
          throw Error(ErrorCategory::parse,
                      fmt::format("{}: face {} index {} out of range (have {} vertices)", path, f, list->list_values[k], n));
        }
      }
      for (auto k = begin + 1; k + 1 < end; ++k) {
        mesh.faces.push_back({static_cast<std::uint32_t>(list->list_values[begin]),
                              static_cast<std::uint32_t>(list->list_values[k]),
                              static_cast<std::uint32_t>(list->list_values[k + 1])});
      }
    }
  }
  return mesh;
}

void save_obj(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  std::string buf;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const auto& v = mesh.vertices[i];
    if (mesh.has_colors()) {
      const auto& c = mesh.colors[i];
      buf += fmt::format("v {:.17g} {:.17g} {:.17g} {:.9g} {:.9g} {:.9g}\n", v.x(), v.y(), v.z(), c.x(), c.y(), c.z());
    } else {
      buf += fmt::format("v {:.17g} {:.17g} {:.17g}\n", v.x(), v.y(), v.z());
    }
  }
  for (const auto& n : mesh.normals) buf += fmt::format("vn {:.9g} {:.9g} {:.9g}\n", n.x(), n.y(), n.z());
  for (const auto& f : mesh.faces) {
    if (mesh.has_normals()) {
      buf += fmt::format("f {0}//{0} {1}//{1} {2}//{2}\n", f[0] + 1, f[1] + 1, f[2] + 1);
    } else {
      buf += fmt::format("f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1);
    }
  }
  out << buf;
  if (!out) throw io_error("write failed for '" + path + "'");
}

void save_ply_mesh(const TriangleMesh& mesh, const std::string& path, bool binary) {
  ply::File file;
  file.format = binary ? ply::Format::binary_little_endian : ply::Format::ascii;
  ply::Element vertex;
  vertex.name = "vertex";
  vertex.count = mesh.vertices.size();
  const ply::Type coord = binary ? ply::Type::float32 : ply::Type::float64;
  auto add = [&](const char* name, ply::Type type, auto getter) {
    ply::Property p;
    p.name = name;
    p.type = type;
    p.values.reserve(vertex.count);
    for (std::size_t i = 0; i < vertex.count; ++i) p.values.push_back(getter(i));
    vertex.properties.push_back(std::move(p));
  };
  for (int k = 0; k < 3; ++k) {
    add(k == 0 ? "x" : k == 1 ? "y" : "z", coord, [&](std::size_t i) { return mesh.vertices[i][k]; });
  }
  if (mesh.has_normals()) {
    for (int k = 0; k < 3; ++k) {
      add(k == 0 ? "nx" : k == 1 ? "ny" : "nz", ply::Type::float32, [&](std::size_t i) { return mesh.normals[i][k]; });
    }
  }
  if (mesh.has_colors()) {
    for (int k = 0; k < 3; ++k) {
      add(k == 0 ? "red" : k == 1 ? "green" : "blue", ply::Type::uint8,
          [&](std::size_t i) { return std::round(std::clamp(mesh.colors[i][k], 0.0, 1.0) * 255.0); });
    }
  }
  file.elements.push_back(std::move(vertex));

  ply::Element face;
  face.name = "face";
  face.count = mesh.faces.size();
  ply::Property list;
  list.name = "vertex_indices";
  list.is_list = true;
  list.count_type = ply::Type::uint8;
  list.type = ply::Type::int32;
  list.list_offsets.push_back(0);
  for (const auto& f : mesh.faces) {
    for (auto idx : f) list.list_values.push_back(idx);
    list.list_offsets.push_back(static_cast<std::uint32_t>(list.list_values.size()));
  }
  face.properties.push_back(std::move(list));
  file.elements.push_back(std::move(face));
  ply::write(file, path);
}

}  // namespace

MeshLoadResult load_mesh(const std::string& path) {
  const std::string ext = lower_extension(path);
  MeshLoadResult result;
  if (ext == ".obj") result.mesh = load_obj(path);
  else if (ext == ".ply") result.mesh = load_ply_mesh(path);
  else throw invalid_argument("unsupported mesh extension '" + ext + "' for " + path);
  result.mesh.validate();
  result.dropped_degenerate_faces = remove_degenerate_faces(result.mesh);
  return result;
}

void save_mesh(const TriangleMesh& mesh, const std::string& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".obj") save_mesh(mesh, path, MeshFormat::obj);
  else if (ext == ".ply") save_mesh(mesh, path, MeshFormat::ply_binary);
  else throw invalid_argument("unsupported mesh extension '" + ext + "' for " + path);
}

void save_mesh(const TriangleMesh& mesh, const std::string& path, MeshFormat format) {
  mesh.validate();
  switch (format) {
    case MeshFormat::obj: save_obj(mesh, path); break;
    case MeshFormat::ply_ascii: save_ply_mesh(mesh, path, false); break;
    case MeshFormat::ply_binary: save_ply_mesh(mesh, path, true); break;
  }
}

}  // namespace splatsim
