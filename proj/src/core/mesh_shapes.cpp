#include "splatsim/core/mesh_shapes.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

#include "splatsim/core/error.hpp"

namespace splatsim {

namespace {

constexpr double kPi = std::numbers::pi;

// Welds vertices by quantized position.
class VertexWelder {
 public:
  explicit VertexWelder(TriangleMesh& mesh, double quantum = 1e-9) : mesh_(mesh), quantum_(quantum) {}

  std::uint32_t add(const Eigen::Vector3d& p) {
    const auto key = std::make_tuple(std::llround(p.x() / quantum_), std::llround(p.y() / quantum_),
                                     std::llround(p.z() / quantum_));
    auto [it, inserted] = index_.try_emplace(key, static_cast<std::uint32_t>(mesh_.vertices.size()));
    if (inserted) mesh_.vertices.push_back(p);
    return it->second;
  }

 private:
  TriangleMesh& mesh_;
  double quantum_;
  std::map<std::tuple<long long, long long, long long>, std::uint32_t> index_;
};

}  // namespace

TriangleMesh make_box(const Eigen::Vector3d& extents) { return make_subdivided_box(extents, 1); }

TriangleMesh make_subdivided_box(const Eigen::Vector3d& extents, int divisions) {
  if (divisions < 1) throw invalid_argument("box divisions must be >= 1");
  TriangleMesh mesh;
  VertexWelder weld(mesh);
  const Eigen::Vector3d h = 0.5 * extents;
  // For each face: outward normal axis, sign, and two in-plane axes (u, v)
  // ordered so that u x v points outward.
  for (int axis = 0; axis < 3; ++axis) {
    for (int sign : {-1, 1}) {
      int u = (axis + 1) % 3;
      int v = (axis + 2) % 3;
      if (sign < 0) std::swap(u, v);
      std::vector<std::vector<std::uint32_t>> ids(divisions + 1, std::vector<std::uint32_t>(divisions + 1));
      for (int i = 0; i <= divisions; ++i) {
        for (int j = 0; j <= divisions; ++j) {
          Eigen::Vector3d p;
          p[axis] = sign * h[axis];
          p[u] = -h[u] + extents[u] * i / divisions;
          p[v] = -h[v] + extents[v] * j / divisions;
          ids[i][j] = weld.add(p);
        }
      }
      for (int i = 0; i < divisions; ++i) {
        for (int j = 0; j < divisions; ++j) {
          mesh.faces.push_back({ids[i][j], ids[i + 1][j], ids[i + 1][j + 1]});
          mesh.faces.push_back({ids[i][j], ids[i + 1][j + 1], ids[i][j + 1]});
        }
      }
    }
  }
  return mesh;
}

TriangleMesh make_cylinder(double radius, double height, int segments, bool capped) {
  if (segments < 3) throw invalid_argument("cylinder needs at least 3 segments");
  TriangleMesh mesh;
  const double hz = 0.5 * height;
  for (int k = 0; k < segments; ++k) {
    const double a = 2.0 * kPi * k / segments;
    mesh.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), -hz);
    mesh.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), hz);
  }
  const auto n = static_cast<std::uint32_t>(segments);
  for (std::uint32_t k = 0; k < n; ++k) {
    const std::uint32_t b0 = 2 * k, t0 = 2 * k + 1;
    const std::uint32_t b1 = 2 * ((k + 1) % n), t1 = 2 * ((k + 1) % n) + 1;
    mesh.faces.push_back({b0, b1, t1});
    mesh.faces.push_back({b0, t1, t0});
  }
  if (capped) {
    const auto bottom = static_cast<std::uint32_t>(mesh.vertices.size());
    mesh.vertices.emplace_back(0.0, 0.0, -hz);
    const auto top = bottom + 1;
    mesh.vertices.emplace_back(0.0, 0.0, hz);
    for (std::uint32_t k = 0; k < n; ++k) {
      const std::uint32_t k1 = (k + 1) % n;
      mesh.faces.push_back({bottom, 2 * k1, 2 * k});
      mesh.faces.push_back({top, 2 * k + 1, 2 * k1 + 1});
    }
  }
  return mesh;
}

TriangleMesh make_uv_sphere(double radius, int rings, int segments) {
  if (rings < 2 || segments < 3) throw invalid_argument("sphere needs rings >= 2 and segments >= 3");
  TriangleMesh mesh;
  mesh.vertices.emplace_back(0.0, 0.0, radius);
  for (int r = 1; r < rings; ++r) {
    const double theta = kPi * r / rings;
    for (int s = 0; s < segments; ++s) {
      const double phi = 2.0 * kPi * s / segments;
      mesh.vertices.emplace_back(radius * std::sin(theta) * std::cos(phi),
                                 radius * std::sin(theta) * std::sin(phi), radius * std::cos(theta));
    }
  }
  const auto south = static_cast<std::uint32_t>(mesh.vertices.size());
  mesh.vertices.emplace_back(0.0, 0.0, -radius);
  const auto seg = static_cast<std::uint32_t>(segments);
  auto ring_vertex = [&](int r, std::uint32_t s) { return 1 + static_cast<std::uint32_t>(r - 1) * seg + s % seg; };
  for (std::uint32_t s = 0; s < seg; ++s) mesh.faces.push_back({0, ring_vertex(1, s), ring_vertex(1, s + 1)});
  for (int r = 1; r + 1 < rings; ++r) {
    for (std::uint32_t s = 0; s < seg; ++s) {
      const auto a = ring_vertex(r, s), b = ring_vertex(r, s + 1);
      const auto c = ring_vertex(r + 1, s), d = ring_vertex(r + 1, s + 1);
      mesh.faces.push_back({a, c, d});
      mesh.faces.push_back({a, d, b});
    }
  }
  for (std::uint32_t s = 0; s < seg; ++s) {
    mesh.faces.push_back({south, ring_vertex(rings - 1, s + 1), ring_vertex(rings - 1, s)});
  }
  return mesh;
}

TriangleMesh make_icosphere(double radius, int subdivisions) {
  if (subdivisions < 0) throw invalid_argument("icosphere subdivisions must be non-negative");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh mesh;
  mesh.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                   {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  mesh.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (auto& v : mesh.vertices) v.normalize();
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoints;
    auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      const auto it = midpoints.find(key);
      if (it != midpoints.end()) return it->second;
      const auto id = static_cast<std::uint32_t>(mesh.vertices.size());
      mesh.vertices.push_back((mesh.vertices[a] + mesh.vertices[b]).normalized());
      midpoints.emplace(key, id);
      return id;
    };
    std::vector<Face> faces;
    faces.reserve(mesh.faces.size() * 4);
    for (const Face& f : mesh.faces) {
      const std::uint32_t ab = midpoint(f[0], f[1]), bc = midpoint(f[1], f[2]), ca = midpoint(f[2], f[0]);
      faces.push_back({f[0], ab, ca});
      faces.push_back({f[1], bc, ab});
      faces.push_back({f[2], ca, bc});
      faces.push_back({ab, bc, ca});
    }
    mesh.faces = std::move(faces);
  }
  for (auto& v : mesh.vertices) v *= radius;
  return mesh;
}

TriangleMesh make_capsule(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double radius, int segments,
                          int cap_rings) {
  if (segments < 3 || cap_rings < 1) throw invalid_argument("capsule needs segments >= 3 and cap_rings >= 1");
  const double length = (b - a).norm();
  // Rings from the top pole down: cap_rings per hemisphere, with the two
  // equator rings separated by the cylinder length.
  std::vector<std::pair<double, double>> rings;  // (z, ring radius)
  for (int r = 1; r <= cap_rings; ++r) {
    const double theta = 0.5 * kPi * r / cap_rings;
    rings.emplace_back(length + radius * std::cos(theta), radius * std::sin(theta));
  }
  for (int r = 0; r < cap_rings; ++r) {
    const double theta = 0.5 * kPi + 0.5 * kPi * r / cap_rings;
    rings.emplace_back(radius * std::cos(theta), radius * std::sin(theta));
  }
  TriangleMesh mesh;
  mesh.vertices.emplace_back(0.0, 0.0, length + radius);
  for (const auto& [z, rr] : rings) {
    for (int s = 0; s < segments; ++s) {
      const double phi = 2.0 * kPi * s / segments;
      mesh.vertices.emplace_back(rr * std::cos(phi), rr * std::sin(phi), z);
    }
  }
  const auto south = static_cast<std::uint32_t>(mesh.vertices.size());
  mesh.vertices.emplace_back(0.0, 0.0, -radius);
  const auto seg = static_cast<std::uint32_t>(segments);
  const auto ring_count = static_cast<std::uint32_t>(rings.size());
  auto ring_vertex = [&](std::uint32_t r, std::uint32_t s) { return 1 + r * seg + s % seg; };
  for (std::uint32_t s = 0; s < seg; ++s) mesh.faces.push_back({0, ring_vertex(0, s), ring_vertex(0, s + 1)});
  for (std::uint32_t r = 0; r + 1 < ring_count; ++r) {
    for (std::uint32_t s = 0; s < seg; ++s) {
      const auto p = ring_vertex(r, s), q = ring_vertex(r, s + 1);
      const auto c = ring_vertex(r + 1, s), d = ring_vertex(r + 1, s + 1);
      mesh.faces.push_back({p, c, d});
      mesh.faces.push_back({p, d, q});
    }
  }
  for (std::uint32_t s = 0; s < seg; ++s) {
    mesh.faces.push_back({south, ring_vertex(ring_count - 1, s + 1), ring_vertex(ring_count - 1, s)});
  }
  const Eigen::Vector3d axis = length > 1e-12 ? Eigen::Vector3d((b - a) / length) : Eigen::Vector3d::UnitZ();
  const Eigen::Quaterniond q = Eigen::Quaterniond::FromTwoVectors(Eigen::Vector3d::UnitZ(), axis);
  for (auto& v : mesh.vertices) v = q * v + a;
  return mesh;
}

TriangleMesh make_grid(int cells_x, int cells_y, double size_x, double size_y) {
  if (cells_x < 1 || cells_y < 1) throw invalid_argument("grid needs at least one cell per axis");
  TriangleMesh mesh;
  for (int j = 0; j <= cells_y; ++j) {
    for (int i = 0; i <= cells_x; ++i) {
      mesh.vertices.emplace_back(size_x * i / cells_x, size_y * j / cells_y, 0.0);
    }
  }
  const auto row = static_cast<std::uint32_t>(cells_x + 1);
  for (int j = 0; j < cells_y; ++j) {
    for (int i = 0; i < cells_x; ++i) {
      const std::uint32_t v00 = j * row + i, v10 = v00 + 1, v01 = v00 + row, v11 = v01 + 1;
      mesh.faces.push_back({v00, v10, v11});
      mesh.faces.push_back({v00, v11, v01});
    }
  }
  mesh.normals.assign(mesh.vertices.size(), Eigen::Vector3d::UnitZ());
  return mesh;
}

TriangleMesh merge_meshes(const std::vector<TriangleMesh>& parts) {
  TriangleMesh out;
  bool colors = !parts.empty();
  bool normals = !parts.empty();
  for (const auto& p : parts) {
    colors = colors && p.has_colors();
    normals = normals && p.has_normals();
  }
  for (const auto& p : parts) {
    const auto base = static_cast<std::uint32_t>(out.vertices.size());
    out.vertices.insert(out.vertices.end(), p.vertices.begin(), p.vertices.end());
    if (colors) out.colors.insert(out.colors.end(), p.colors.begin(), p.colors.end());
    if (normals) out.normals.insert(out.normals.end(), p.normals.begin(), p.normals.end());
    for (Face f : p.faces) {
      for (auto& idx : f) idx += base;
      out.faces.push_back(f);
    }
  }
  return out;
}

void paint(TriangleMesh& mesh, const Eigen::Vector3d& color) {
  mesh.colors.assign(mesh.vertices.size(), color);
}

}  // namespace splatsim
