#include "splatsim/geometry/mesh_processing.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <queue>
#include <tuple>

#include <Eigen/LU>
#include <fmt/format.h>

#include "splatsim/core/error.hpp"

namespace splatsim {

namespace {

using Eigen::Matrix4d;
using Eigen::Vector3d;
using Eigen::Vector4d;

// Boundary planes dominate face planes so open borders hold their shape.
constexpr double kBoundaryWeight = 1e3;

Matrix4d plane_quadric(const Vector3d& n, const Vector3d& point, double weight) {
  const Vector4d p(n.x(), n.y(), n.z(), -n.dot(point));
  return weight * p * p.transpose();
}

double quadric_cost(const Matrix4d& q, const Vector3d& x) {
  const Vector4d h(x.x(), x.y(), x.z(), 1.0);
  return std::max(0.0, h.dot(q * h));
}

struct Candidate {
  double cost;
  std::uint32_t u, v;
  std::uint32_t stamp_u, stamp_v;
  Vector3d position;
};

struct CandidateOrder {
  bool operator()(const Candidate& a, const Candidate& b) const {
    return std::tie(a.cost, a.u, a.v) > std::tie(b.cost, b.u, b.v);
  }
};

class Simplifier {
 public:
  explicit Simplifier(const TriangleMesh& mesh) : mesh_(mesh) {
    const std::size_t nv = mesh.vertices.size();
    pos_ = mesh.vertices;
    quadric_.assign(nv, Matrix4d::Zero());
    vertex_faces_.resize(nv);
    boundary_.assign(nv, false);
    locked_.assign(nv, false);
    stamp_.assign(nv, 0);
    face_alive_.assign(mesh.faces.size(), true);
    bounds_ = mesh.bounds();
    tol_ = 1e-9 * std::max(bounds_.diagonal(), 1e-300);
    for (std::uint32_t v = 0; v < nv; ++v) {
      for (int side = 0; side < 6; ++side) extreme_count_[side] += on_side(pos_[v], side);
    }
    faces_ = mesh.faces;
    live_faces_ = faces_.size();

    std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::uint32_t>> edge_faces;
    for (std::uint32_t f = 0; f < faces_.size(); ++f) {
      const Face& face = faces_[f];
      const Vector3d cross = mesh.face_cross(f);
      const double len = cross.norm();
      if (len > 0.0) {
        const Vector3d n = cross / len;
        const Matrix4d q = plane_quadric(n, pos_[face[0]], 1.0);
        for (std::uint32_t v : face) quadric_[v] += q;
      }
      for (int k = 0; k < 3; ++k) {
        vertex_faces_[face[k]].push_back(f);
        const std::uint32_t a = face[k], b = face[(k + 1) % 3];
        edge_faces[{std::min(a, b), std::max(a, b)}].push_back(f);
      }
    }
    for (const auto& [e, faces] : edge_faces) {
      if (faces.size() > 2) {
        ++non_manifold_edges_;
        locked_[e.first] = locked_[e.second] = true;
      } else if (faces.size() == 1) {
        boundary_[e.first] = boundary_[e.second] = true;
        const Vector3d cross = mesh.face_cross(faces[0]);
        const Vector3d edge = pos_[e.second] - pos_[e.first];
        const Vector3d n = edge.cross(cross);
        if (n.norm() > 0.0) {
          const Matrix4d q = plane_quadric(n.normalized(), pos_[e.first], kBoundaryWeight);
          quadric_[e.first] += q;
          quadric_[e.second] += q;
        }
      }
    }
    for (const auto& [e, faces] : edge_faces) push_edge(e.first, e.second);
  }

  void run(std::size_t target, SimplifyStats& stats) {
    stats.non_manifold_edges = non_manifold_edges_;
    while (live_faces_ > target && !queue_.empty()) {
      const Candidate c = queue_.top();
      queue_.pop();
      if (c.stamp_u != stamp_[c.u] || c.stamp_v != stamp_[c.v]) continue;
      if (!collapse_allowed(c.u, c.v, c.position)) continue;
      collapse(c.u, c.v, c.position);
      ++stats.collapses;
      stats.max_collapse_error = std::max(stats.max_collapse_error, c.cost);
    }
  }

  TriangleMesh result() const {
    TriangleMesh out;
    out.vertices = pos_;
    if (mesh_.has_colors()) out.colors = mesh_.colors;
    for (std::uint32_t f = 0; f < faces_.size(); ++f) {
      if (face_alive_[f]) out.faces.push_back(faces_[f]);
    }
    remove_unreferenced_vertices(out);
    remove_degenerate_faces(out);
    remove_unreferenced_vertices(out);
    return out;
  }

 private:
  // Sides 0..2 are the min faces of the original AABB, 3..5 the max faces.
  bool on_side(const Vector3d& x, int side) const {
    const int axis = side % 3;
    return side < 3 ? x[axis] <= bounds_.min[axis] + tol_ : x[axis] >= bounds_.max[axis] - tol_;
  }

  bool inside_bounds(const Vector3d& x) const {
    return (x.array() >= bounds_.min.array() - tol_).all() && (x.array() <= bounds_.max.array() + tol_).all();
  }

  std::vector<std::uint32_t> neighbors(std::uint32_t v) const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t f : vertex_faces_[v]) {
      if (!face_alive_[f]) continue;
      for (std::uint32_t w : faces_[f]) {
        if (w != v) out.push_back(w);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  void push_edge(std::uint32_t a, std::uint32_t b) {
    if (locked_[a] || locked_[b]) return;
    const std::uint32_t u = std::min(a, b), v = std::max(a, b);
    const Matrix4d q = quadric_[u] + quadric_[v];
    // Candidate placements, in tie-break order.
    std::vector<Vector3d> options{pos_[u], pos_[v], 0.5 * (pos_[u] + pos_[v])};
    const Eigen::Matrix3d a3 = q.topLeftCorner<3, 3>();
    Eigen::FullPivLU<Eigen::Matrix3d> lu(a3);
    lu.setThreshold(1e-10);
    if (lu.isInvertible()) {
      const Vector3d opt = lu.solve(-q.topRightCorner<3, 1>());
      // Far-flung optima of nearly singular systems are not trusted.
      const double reach = 2.0 * (pos_[u] - pos_[v]).norm();
      if (opt.allFinite() && (opt - options[2]).norm() <= reach && inside_bounds(opt)) options.push_back(opt);
    }
    Candidate best{std::numeric_limits<double>::infinity(), u, v, stamp_[u], stamp_[v], options[0]};
    for (const auto& x : options) {
      const double cost = quadric_cost(q, x);
      if (cost < best.cost) {
        best.cost = cost;
        best.position = x;
      }
    }
    queue_.push(best);
  }

  bool collapse_allowed(std::uint32_t u, std::uint32_t v, const Vector3d& p) const {
    // The original AABB keeps at least one vertex on each of its faces.
    for (int side = 0; side < 6; ++side) {
      const int before = on_side(pos_[u], side) + on_side(pos_[v], side);
      if (before > 0 && extreme_count_[side] - before + on_side(p, side) == 0) return false;
    }
    std::vector<std::uint32_t> shared_faces;
    std::vector<std::uint32_t> opposite;
    for (std::uint32_t f : vertex_faces_[u]) {
      if (!face_alive_[f]) continue;
      const Face& face = faces_[f];
      if (std::find(face.begin(), face.end(), v) == face.end()) continue;
      shared_faces.push_back(f);
      for (std::uint32_t w : face) {
        if (w != u && w != v) opposite.push_back(w);
      }
    }
    if (shared_faces.empty() || shared_faces.size() > 2) return false;
    // An interior edge joining two boundary vertices would pinch the border.
    if (shared_faces.size() == 2 && boundary_[u] && boundary_[v]) return false;

    // Link condition: the only common neighbors are the opposite vertices.
    const auto nu = neighbors(u), nv = neighbors(v);
    std::vector<std::uint32_t> common;
    std::set_intersection(nu.begin(), nu.end(), nv.begin(), nv.end(), std::back_inserter(common));
    std::sort(opposite.begin(), opposite.end());
    if (common != opposite) return false;

    // Surviving faces must keep their orientation.
    for (std::uint32_t endpoint : {u, v}) {
      for (std::uint32_t f : vertex_faces_[endpoint]) {
        if (!face_alive_[f]) continue;
        if (std::find(shared_faces.begin(), shared_faces.end(), f) != shared_faces.end()) continue;
        const Face& face = faces_[f];
        std::array<Vector3d, 3> before, after;
        for (int k = 0; k < 3; ++k) {
          before[k] = pos_[face[k]];
          after[k] = (face[k] == u || face[k] == v) ? p : pos_[face[k]];
        }
        const Vector3d n0 = (before[1] - before[0]).cross(before[2] - before[0]);
        const Vector3d n1 = (after[1] - after[0]).cross(after[2] - after[0]);
        if (n1.dot(n0) <= 1e-6 * n0.norm() * n1.norm() || n1.norm() <= 1e-12 * n0.norm()) return false;
      }
    }
    return true;
  }

  void collapse(std::uint32_t u, std::uint32_t v, const Vector3d& p) {
    for (std::uint32_t f : vertex_faces_[v]) {
      if (!face_alive_[f]) continue;
      Face& face = faces_[f];
      if (std::find(face.begin(), face.end(), u) != face.end()) {
        face_alive_[f] = false;
        --live_faces_;
        continue;
      }
      for (auto& w : face) {
        if (w == v) w = u;
      }
      vertex_faces_[u].push_back(f);
    }
    vertex_faces_[v].clear();
    for (int side = 0; side < 6; ++side) {
      extreme_count_[side] += on_side(p, side) - on_side(pos_[u], side) - on_side(pos_[v], side);
    }
    pos_[u] = p;
    quadric_[u] += quadric_[v];
    boundary_[u] = boundary_[u] || boundary_[v];
    ++stamp_[u];
    ++stamp_[v];
    auto& list = vertex_faces_[u];
    list.erase(std::remove_if(list.begin(), list.end(), [&](std::uint32_t f) { return !face_alive_[f]; }),
               list.end());
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    // Edges rejected earlier may have become legal around the new vertex.
    for (std::uint32_t w : neighbors(u)) {
      ++stamp_[w];
      for (std::uint32_t x : neighbors(w)) push_edge(w, x);
    }
  }

  const TriangleMesh& mesh_;
  std::vector<Vector3d> pos_;
  std::vector<Matrix4d> quadric_;
  std::vector<std::vector<std::uint32_t>> vertex_faces_;
  std::vector<bool> boundary_, locked_;
  std::vector<std::uint32_t> stamp_;
  std::vector<Face> faces_;
  std::vector<bool> face_alive_;
  std::size_t live_faces_ = 0;
  Aabb bounds_;
  double tol_ = 0.0;
  std::array<int, 6> extreme_count_{};
  std::size_t non_manifold_edges_ = 0;
  std::priority_queue<Candidate, std::vector<Candidate>, CandidateOrder> queue_;
};

}  // namespace

TriangleMesh simplify_mesh(const TriangleMesh& mesh, std::size_t target_faces, SimplifyStats* stats) {
  if (target_faces < 2) throw invalid_argument(fmt::format("target face count must be >= 2 (got {})", target_faces));
  mesh.validate();
  SimplifyStats local;
  if (mesh.faces.size() <= target_faces) {
    if (stats) *stats = local;
    return mesh;
  }
  Simplifier simplifier(mesh);
  simplifier.run(target_faces, local);
  if (stats) *stats = local;
  return simplifier.result();
}

}  // namespace splatsim
