#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "splatsim/core/image.hpp"
#include "splatsim/core/rng.hpp"

namespace splatsim {

enum class AugmentKind { gaussian_blur, defocus, color_jitter, gaussian_noise };

// Parameters by kind:
//   gaussian_blur   a = sigma (px)
//   defocus         a = disc radius (px)
//   color_jitter    a, b, c = brightness, contrast, saturation factors; each
//                   multiplier is drawn log-uniformly from [1/f, f] (f >= 1)
//                   or [f, 1/f] (f < 1), so f = 1 leaves that channel alone
//   gaussian_noise  a = sigma (8-bit units)
struct AugmentTransform {
  AugmentKind kind = AugmentKind::gaussian_blur;
  double a = 0.0;
  double b = 1.0;
  double c = 1.0;
  double probability = 1.0;
};

struct AugmentationSpec {
  std::vector<AugmentTransform> transforms;

  void validate() const;
  // Blur, defocus, jitter and noise at moderate strengths, each with p = 0.5.
  static AugmentationSpec defaults();
};

std::string to_string(AugmentKind kind);
AugmentKind augment_kind_from_string(const std::string& name);

// Applies the transforms in order, each with its probability. Each transform
// takes exactly two draws from `rng` (the coin and a private seed for its
// parameters and noise), so whether one fires never shifts the others.
Image8 augment(const Image8& image, const AugmentationSpec& spec, Rng& rng);
Image8 augment(const Image8& image, const AugmentationSpec& spec, std::uint64_t seed);

// Individual transforms. Convolutions replicate edge pixels (clamp-to-edge)
// and use kernels normalized to sum 1.
Image8 gaussian_blur(const Image8& image, double sigma);
Image8 defocus(const Image8& image, double radius);
Image8 color_jitter(const Image8& image, double brightness, double contrast, double saturation);
Image8 gaussian_noise(const Image8& image, double sigma, Rng& rng);

}  // namespace splatsim
