#pragma once

#include <string>

#include "splatsim/core/gaussian.hpp"

namespace splatsim {

// Zeroth-order spherical harmonic coefficient relating stored f_dc values to
// RGB: color = 0.5 + kShC0 * f_dc.
inline constexpr double kShC0 = 0.28209479177387814;

// Reads a trained-splat point file (PLY vertex element with x,y,z,
// f_dc_0..2, opacity, scale_0..2, rot_0..3). Opacity is stored as a logit and
// scales as logs; higher-order color coefficients are ignored. The returned
// cloud has an identity local_to_world pose.
GaussianCloud load_gaussian_cloud(const std::string& path);

// Inverse of load_gaussian_cloud, binary little-endian float32.
void save_gaussian_cloud(const GaussianCloud& cloud, const std::string& path);

}  // namespace splatsim
