#include "splatsim/render/compositor.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "splatsim/core/error.hpp"
#include "splatsim/render/gaussian_rasterizer.hpp"

namespace splatsim {

namespace {

struct Splat {
  ProjectedGaussian p;
  // Inclusive pixel bounds of the region where alpha can reach kMinAlpha.
  int x0, x1, y0, y1;
  // Quadratic-form bound beyond which alpha < kMinAlpha, padded so the
  // exact alpha test below stays the deciding one.
  double q_cut;
  std::uint32_t source;
};

std::array<double, 14> primitive_key(const GaussianPrimitive& g) {
  return {g.mean.x(),        g.mean.y(),        g.mean.z(),        g.rotation.w(), g.rotation.x(),
          g.rotation.y(),    g.rotation.z(),    g.scale.x(),       g.scale.y(),    g.scale.z(),
          g.opacity,         g.color.x(),       g.color.y(),       g.color.z()};
}

// Depth first; exact depth ties are ordered by primitive content so the
// result never depends on input order.
std::vector<Splat> project_and_sort(const CameraView& cam, const GaussianCloud& cloud) {
  std::vector<Splat> splats;
  splats.reserve(cloud.size());
  for (std::uint32_t i = 0; i < cloud.primitives.size(); ++i) {
    const GaussianPrimitive& g = cloud.primitives[i];
    if (!(g.opacity >= kMinAlpha)) continue;
    const auto p = project_gaussian(cam, g, cloud.local_to_world);
    if (!p) continue;
    // alpha >= kMinAlpha requires d^T Sigma'^-1 d <= q_max; the ellipse's
    // bounding box is |dx| <= sqrt(q_max * Sigma'_xx). One pixel of margin
    // absorbs rounding so the per-pixel test stays the only decision.
    const double q_max = 2.0 * std::log(g.opacity / kMinAlpha);
    const double ex = std::sqrt(q_max * p->covariance(0, 0)) + 1.0;
    const double ey = std::sqrt(q_max * p->covariance(1, 1)) + 1.0;
    const double fx0 = std::ceil(p->mean.x() - ex), fx1 = std::floor(p->mean.x() + ex);
    const double fy0 = std::ceil(p->mean.y() - ey), fy1 = std::floor(p->mean.y() + ey);
    if (fx1 < 0.0 || fy1 < 0.0 || fx0 > cam.width - 1 || fy0 > cam.height - 1) continue;
    if (!std::isfinite(fx0 + fx1 + fy0 + fy1)) continue;
    Splat s{*p, static_cast<int>(std::max(fx0, 0.0)), static_cast<int>(std::min(fx1, cam.width - 1.0)),
            static_cast<int>(std::max(fy0, 0.0)), static_cast<int>(std::min(fy1, cam.height - 1.0)),
            q_max * (1.0 + 1e-9) + 1e-9, i};
    splats.push_back(s);
  }
  std::sort(splats.begin(), splats.end(), [&](const Splat& a, const Splat& b) {
    if (a.p.depth != b.p.depth) return a.p.depth < b.p.depth;
    return primitive_key(cloud.primitives[a.source]) < primitive_key(cloud.primitives[b.source]);
  });
  return splats;
}

// The fields the per-pixel loop reads, in one compact record.
struct Hot {
  int x0, x1, y0, y1;
  double mx, my, i00, i01, i11, q_cut, depth, opacity;
  Eigen::Vector3d color;

  static Hot from(const Splat& s) {
    const Eigen::Matrix2d& ic = s.p.inverse_covariance;
    return {s.x0,     s.x1,           s.y0,      s.y1,    s.p.mean.x(), s.p.mean.y(), ic(0, 0),
            ic(0, 1) + ic(1, 0), ic(1, 1), s.q_cut, s.p.depth,    s.p.opacity,  s.p.color};
  }
};

}  // namespace

RenderBuffers composite(const CameraView& cam, const GaussianCloud& cloud, const RenderBuffers& mesh,
                        const Eigen::Vector3d& background_color) {
  cam.validate();
  if (mesh.width != cam.width || mesh.height != cam.height) {
    throw invalid_argument(fmt::format("mesh buffers are {}x{} but the camera is {}x{}", mesh.width, mesh.height,
                                       cam.width, cam.height));
  }
  const std::vector<Splat> splats = project_and_sort(cam, cloud);

  const int tiles_x = (cam.width + kTileSize - 1) / kTileSize;
  const int tiles_y = (cam.height + kTileSize - 1) / kTileSize;
  std::vector<std::vector<std::uint32_t>> bins(static_cast<std::size_t>(tiles_x) * tiles_y);
  for (std::uint32_t s = 0; s < splats.size(); ++s) {
    const Splat& sp = splats[s];
    for (int ty = sp.y0 / kTileSize; ty <= sp.y1 / kTileSize; ++ty) {
      for (int tx = sp.x0 / kTileSize; tx <= sp.x1 / kTileSize; ++tx) bins[ty * tiles_x + tx].push_back(s);
    }
  }

  RenderBuffers out(cam.width, cam.height);
  const int tile_count = tiles_x * tiles_y;
#pragma omp parallel for schedule(dynamic)
  for (int tile = 0; tile < tile_count; ++tile) {
    // Tile-local copies keep the hot loop on contiguous memory.
    std::vector<Hot> hot;
    hot.reserve(bins[tile].size());
    for (std::uint32_t s : bins[tile]) hot.push_back(Hot::from(splats[s]));
    std::vector<const Hot*> row;
    row.reserve(hot.size());
    const int tx = tile % tiles_x, ty = tile / tiles_x;
    const int px_end = std::min(cam.width, (tx + 1) * kTileSize);
    const int py_end = std::min(cam.height, (ty + 1) * kTileSize);
    for (int y = ty * kTileSize; y < py_end; ++y) {
      row.clear();
      for (const Hot& h : hot) {
        if (y >= h.y0 && y <= h.y1) row.push_back(&h);
      }
      for (int x = tx * kTileSize; x < px_end; ++x) {
        const std::size_t pix = out.index(x, y);
        const double mesh_depth = mesh.depth[pix];
        double t = 1.0, weighted_depth = 0.0;
        Eigen::Vector3d c = Eigen::Vector3d::Zero();
        bool stopped = false;
        for (const Hot* h : row) {
          if (x < h->x0 || x > h->x1) continue;
          if (h->depth > mesh_depth) continue;
          const double dx = x - h->mx, dy = y - h->my;
          const double q = h->i00 * dx * dx + h->i01 * dx * dy + h->i11 * dy * dy;
          if (q > h->q_cut) continue;
          const double a = h->opacity * std::exp(-0.5 * q);
          if (a < kMinAlpha) continue;
          c += (a * t) * h->color;
          weighted_depth += a * t * h->depth;
          t *= 1.0 - a;
          if (t < kMinTransmittance) {
            stopped = true;
            break;
          }
        }
        const double accumulated = 1.0 - t;
        const double splat_depth =
            accumulated >= kMinTransmittance ? weighted_depth / accumulated : std::numeric_limits<double>::infinity();
        const double mesh_alpha = mesh.alpha[pix];
        if (mesh_alpha > 0.0 && !stopped) {
          c += (t * mesh_alpha) * mesh.color_at(x, y);
          t *= 1.0 - mesh_alpha;
        }
        c += t * background_color;
        out.set_color(pix, c);
        out.alpha[pix] = 1.0 - t;
        out.depth[pix] = std::min(mesh_depth, splat_depth);
      }
    }
  }
  return out;
}

RenderBuffers render_view(const CameraView& cam, const Scene& scene, const std::vector<MeshInstance>& extra) {
  std::vector<MeshInstance> instances;
  instances.reserve(scene.objects.size() + extra.size());
  for (const RigidObject& obj : scene.objects) instances.push_back({&obj.visual, obj.pose});
  instances.insert(instances.end(), extra.begin(), extra.end());
  return composite(cam, scene.background, rasterize_mesh(cam, instances));
}

RenderedView render_scene(const Scene& scene, const std::string& camera) {
  const RenderBuffers buffers = render_view(scene.camera(camera), scene);
  return {to_image8(buffers), to_depth_image(buffers)};
}

Image8 to_image8(const RenderBuffers& buffers) {
  Image8 img(buffers.width, buffers.height);
  for (std::size_t i = 0; i < buffers.color.size(); ++i) img.data[i] = to_byte(buffers.color[i]);
  return img;
}

DepthImage to_depth_image(const RenderBuffers& buffers) {
  DepthImage d(buffers.width, buffers.height);
  for (std::size_t i = 0; i < buffers.depth.size(); ++i) d.depth[i] = static_cast<float>(buffers.depth[i]);
  return d;
}

}  // namespace splatsim
