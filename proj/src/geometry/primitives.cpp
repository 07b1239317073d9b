#include "splatsim/geometry/primitives.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Geometry>

namespace splatsim {

using Eigen::Vector3d;

Vector3d closest_point_on_triangle(const Vector3d& p, const Vector3d& a, const Vector3d& b, const Vector3d& c) {
  const Vector3d ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vector3d bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

  const Vector3d cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }

  const double denom = va + vb + vc;
  if (!(std::abs(denom) > 0.0)) {
    // Degenerate triangle: nearest of its three edges.
    Vector3d best = closest_point_on_segment(p, a, b);
    for (const Vector3d& q : {closest_point_on_segment(p, b, c), closest_point_on_segment(p, c, a)}) {
      if ((q - p).squaredNorm() < (best - p).squaredNorm()) best = q;
    }
    return best;
  }
  const double v = vb / denom, w = vc / denom;
  return a + v * ab + w * ac;
}

Vector3d closest_point_on_segment(const Vector3d& p, const Vector3d& a, const Vector3d& b) {
  const Vector3d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 <= 0.0) return a;
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return a + t * ab;
}

double segment_segment_squared_distance(const Vector3d& p0, const Vector3d& p1, const Vector3d& q0,
                                        const Vector3d& q1) {
  const Vector3d d1 = p1 - p0, d2 = q1 - q0, r = p0 - q0;
  const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
  double s = 0.0, t = 0.0;
  if (a <= 1e-300 && e <= 1e-300) return r.squaredNorm();
  if (a <= 1e-300) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= 1e-300) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p0 + s * d1) - (q0 + t * d2)).squaredNorm();
}

bool segment_intersects_triangle(const Vector3d& p0, const Vector3d& p1, const Vector3d& a, const Vector3d& b,
                                 const Vector3d& c) {
  const Vector3d n = (b - a).cross(c - a);
  const double s0 = n.dot(p0 - a), s1 = n.dot(p1 - a);
  if ((s0 > 0.0 && s1 > 0.0) || (s0 < 0.0 && s1 < 0.0)) return false;
  // Coplanar segments are resolved by the edge and endpoint distances.
  if (s0 == s1) return false;
  const Vector3d x = p0 + (s0 / (s0 - s1)) * (p1 - p0);
  const double e0 = n.dot((b - a).cross(x - a));
  const double e1 = n.dot((c - b).cross(x - b));
  const double e2 = n.dot((a - c).cross(x - c));
  return e0 >= 0.0 && e1 >= 0.0 && e2 >= 0.0;
}

double segment_triangle_squared_distance(const Vector3d& p0, const Vector3d& p1, const Vector3d& a,
                                         const Vector3d& b, const Vector3d& c) {
  if (segment_intersects_triangle(p0, p1, a, b, c)) return 0.0;
  double best = (closest_point_on_triangle(p0, a, b, c) - p0).squaredNorm();
  best = std::min(best, (closest_point_on_triangle(p1, a, b, c) - p1).squaredNorm());
  best = std::min(best, segment_segment_squared_distance(p0, p1, a, b));
  best = std::min(best, segment_segment_squared_distance(p0, p1, b, c));
  best = std::min(best, segment_segment_squared_distance(p0, p1, c, a));
  return best;
}

double triangle_triangle_squared_distance(const Vector3d& a0, const Vector3d& a1, const Vector3d& a2,
                                          const Vector3d& b0, const Vector3d& b1, const Vector3d& b2) {
  double best = segment_triangle_squared_distance(a0, a1, b0, b1, b2);
  best = std::min(best, segment_triangle_squared_distance(a1, a2, b0, b1, b2));
  best = std::min(best, segment_triangle_squared_distance(a2, a0, b0, b1, b2));
  best = std::min(best, segment_triangle_squared_distance(b0, b1, a0, a1, a2));
  best = std::min(best, segment_triangle_squared_distance(b1, b2, a0, a1, a2));
  best = std::min(best, segment_triangle_squared_distance(b2, b0, a0, a1, a2));
  return best;
}

bool segment_intersects_box(const Vector3d& p0, const Vector3d& p1, const Vector3d& lo, const Vector3d& hi) {
  double t0 = 0.0, t1 = 1.0;
  const Vector3d d = p1 - p0;
  for (int k = 0; k < 3; ++k) {
    if (d[k] == 0.0) {
      if (p0[k] < lo[k] || p0[k] > hi[k]) return false;
      continue;
    }
    const double inv = 1.0 / d[k];
    double ta = (lo[k] - p0[k]) * inv, tb = (hi[k] - p0[k]) * inv;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace splatsim
