#pragma once

#include <Eigen/Core>

namespace splatsim {

// Closest point to p on triangle abc (Voronoi-region walk).
Eigen::Vector3d closest_point_on_triangle(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                                          const Eigen::Vector3d& b, const Eigen::Vector3d& c);

Eigen::Vector3d closest_point_on_segment(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                                         const Eigen::Vector3d& b);

// Squared distance between segments p0p1 and q0q1; degenerate segments are
// treated as points.
double segment_segment_squared_distance(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                                        const Eigen::Vector3d& q0, const Eigen::Vector3d& q1);

// True when segment p0p1 crosses or touches the triangle's interior.
bool segment_intersects_triangle(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1, const Eigen::Vector3d& a,
                                 const Eigen::Vector3d& b, const Eigen::Vector3d& c);

// 0 when the segment pierces the triangle.
double segment_triangle_squared_distance(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                                         const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                         const Eigen::Vector3d& c);

// Exact for triangle pairs: the minimum over the six edge-vs-triangle
// distances (0 when they intersect).
double triangle_triangle_squared_distance(const Eigen::Vector3d& a0, const Eigen::Vector3d& a1,
                                          const Eigen::Vector3d& a2, const Eigen::Vector3d& b0,
                                          const Eigen::Vector3d& b1, const Eigen::Vector3d& b2);

// Slab test of segment p0p1 against the box [lo, hi].
bool segment_intersects_box(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1, const Eigen::Vector3d& lo,
                            const Eigen::Vector3d& hi);

}  // namespace splatsim
