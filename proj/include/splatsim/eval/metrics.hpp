#pragma once

#include "splatsim/core/image.hpp"

namespace splatsim {

// Returned for identical images and used as the upper bound.
inline constexpr double kPsnrCap = 99.0;

// 10 log10(255^2 / MSE) over all channels, capped at kPsnrCap. Throws
// invalid_argument on a size mismatch.
double psnr(const Image8& a, const Image8& b);

// Single-scale SSIM on luma (0.299 R + 0.587 G + 0.114 B), 11x11 Gaussian
// window with sigma 1.5, K1 = 0.01, K2 = 0.03, averaged over every window
// position fully inside the image. Both sides must be at least 11 px.
double ssim(const Image8& a, const Image8& b);

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;

}  // namespace splatsim
