#include "splatsim/render/mesh_rasterizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace splatsim {

namespace {

struct ClipVertex {
  Eigen::Vector3d p;  // camera space
  Eigen::Vector3d albedo;
};

// Sutherland-Hodgman against z >= near; a triangle yields at most 4 vertices.
int clip_near(const std::array<ClipVertex, 3>& in, double near, std::array<ClipVertex, 4>& out) {
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const ClipVertex& a = in[i];
    const ClipVertex& b = in[(i + 1) % 3];
    const bool a_in = a.p.z() >= near, b_in = b.p.z() >= near;
    if (a_in) out[n++] = a;
    if (a_in != b_in) {
      const double t = (near - a.p.z()) / (b.p.z() - a.p.z());
      ClipVertex v{a.p + t * (b.p - a.p), a.albedo + t * (b.albedo - a.albedo)};
      v.p.z() = near;
      out[n++] = v;
    }
  }
  return n;
}

void raster_triangle(const CameraView& cam, const ClipVertex& v0, const ClipVertex& v1, const ClipVertex& v2,
                     const Eigen::Vector3d& normal, RenderBuffers& out) {
  const Eigen::Vector2d s0 = cam.project_camera(v0.p), s1 = cam.project_camera(v1.p), s2 = cam.project_camera(v2.p);
  auto edge = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b, double x, double y) {
    return (b.x() - a.x()) * (y - a.y()) - (b.y() - a.y()) * (x - a.x());
  };
  const double area = edge(s0, s1, s2.x(), s2.y());
  if (!(std::abs(area) > 0.0) || !std::isfinite(area)) return;
  const int x0 = std::max(0, static_cast<int>(std::ceil(std::min({s0.x(), s1.x(), s2.x()}))));
  const int x1 = std::min(out.width - 1, static_cast<int>(std::floor(std::max({s0.x(), s1.x(), s2.x()}))));
  const int y0 = std::max(0, static_cast<int>(std::ceil(std::min({s0.y(), s1.y(), s2.y()}))));
  const int y1 = std::min(out.height - 1, static_cast<int>(std::floor(std::max({s0.y(), s1.y(), s2.y()}))));
  const double iz0 = 1.0 / v0.p.z(), iz1 = 1.0 / v1.p.z(), iz2 = 1.0 / v2.p.z();
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double w0 = edge(s1, s2, x, y), w1 = edge(s2, s0, x, y), w2 = edge(s0, s1, x, y);
      const bool inside = area > 0.0 ? (w0 >= 0.0 && w1 >= 0.0 && w2 >= 0.0) : (w0 <= 0.0 && w1 <= 0.0 && w2 <= 0.0);
      if (!inside) continue;
      const double b0 = w0 / area, b1 = w1 / area, b2 = w2 / area;
      const double inv_z = b0 * iz0 + b1 * iz1 + b2 * iz2;
      const double z = 1.0 / inv_z;
      const std::size_t pix = out.index(x, y);
      if (!(z < out.depth[pix])) continue;
      const Eigen::Vector3d albedo = z * (b0 * iz0 * v0.albedo + b1 * iz1 * v1.albedo + b2 * iz2 * v2.albedo);
      out.depth[pix] = z;
      out.alpha[pix] = 1.0;
      out.set_color(pix, shade(albedo, normal));
    }
  }
}

}  // namespace

Eigen::Vector3d shade(const Eigen::Vector3d& albedo, const Eigen::Vector3d& world_normal) {
  return albedo * (kAmbient + kDiffuse * std::abs(world_normal.dot(kLightDirection)));
}

RenderBuffers rasterize_mesh(const CameraView& cam, const std::vector<MeshInstance>& instances) {
  cam.validate();
  RenderBuffers out(cam.width, cam.height);
  std::vector<Eigen::Vector3d> cam_vertices;
  for (const MeshInstance& inst : instances) {
    if (inst.mesh == nullptr) continue;
    const TriangleMesh& mesh = *inst.mesh;
    const Pose to_camera = compose(cam.world_to_camera, inst.local_to_world);
    cam_vertices.resize(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) cam_vertices[i] = to_camera.apply(mesh.vertices[i]);
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
      const Face& face = mesh.faces[f];
      const Eigen::Vector3d cross = mesh.face_cross(f);
      if (!(cross.norm() > 0.0)) continue;
      const Eigen::Vector3d normal = inst.local_to_world.rotate(cross.normalized());
      std::array<ClipVertex, 3> tri;
      for (int k = 0; k < 3; ++k) {
        tri[k].p = cam_vertices[face[k]];
        tri[k].albedo = mesh.has_colors() ? mesh.colors[face[k]] : kDefaultMeshColor;
      }
      if (tri[0].p.z() < cam.near && tri[1].p.z() < cam.near && tri[2].p.z() < cam.near) continue;
      std::array<ClipVertex, 4> poly;
      const int n = clip_near(tri, cam.near, poly);
      for (int k = 1; k + 1 < n; ++k) raster_triangle(cam, poly[0], poly[k], poly[k + 1], normal, out);
    }
  }
  return out;
}

}  // namespace splatsim
