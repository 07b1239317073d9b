#include "splatsim/dataset/augment.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "splatsim/core/error.hpp"

namespace splatsim {

namespace {

std::uint8_t clamp_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

// Multiplier drawn log-uniformly between f and 1/f.
double jitter_multiplier(double factor, Rng& rng) {
  const double span = std::abs(std::log(factor));
  return std::exp(rng.uniform(-span, span));
}

}  // namespace

void AugmentationSpec::validate() const {
  for (std::size_t i = 0; i < transforms.size(); ++i) {
    const AugmentTransform& t = transforms[i];
    const std::string where = fmt::format("augmentation {} ({})", i, to_string(t.kind));
    if (!(t.probability >= 0.0 && t.probability <= 1.0)) throw invalid_argument(where + ": probability must be in [0, 1]");
    switch (t.kind) {
      case AugmentKind::gaussian_blur:
      case AugmentKind::defocus:
      case AugmentKind::gaussian_noise:
        if (!(t.a >= 0.0) || !std::isfinite(t.a)) throw invalid_argument(where + ": parameter must be finite and >= 0");
        break;
      case AugmentKind::color_jitter:
        for (double f : {t.a, t.b, t.c}) {
          if (!(f > 0.0) || !std::isfinite(f)) throw invalid_argument(where + ": factors must be finite and > 0");
        }
        break;
    }
  }
}

AugmentationSpec AugmentationSpec::defaults() {
  AugmentationSpec spec;
  spec.transforms = {
      {AugmentKind::gaussian_blur, 1.0, 1.0, 1.0, 0.5},
      {AugmentKind::defocus, 2.0, 1.0, 1.0, 0.5},
      {AugmentKind::color_jitter, 1.2, 1.2, 1.2, 0.5},
      {AugmentKind::gaussian_noise, 4.0, 1.0, 1.0, 0.5},
  };
  return spec;
}

std::string to_string(AugmentKind kind) {
  switch (kind) {
    case AugmentKind::gaussian_blur: return "gaussian_blur";
    case AugmentKind::defocus: return "defocus";
    case AugmentKind::color_jitter: return "color_jitter";
    case AugmentKind::gaussian_noise: return "gaussian_noise";
  }
  return "unknown";
}

AugmentKind augment_kind_from_string(const std::string& name) {
  for (AugmentKind k : {AugmentKind::gaussian_blur, AugmentKind::defocus, AugmentKind::color_jitter,
                        AugmentKind::gaussian_noise}) {
    if (to_string(k) == name) return k;
  }
  throw invalid_argument(fmt::format("unknown augmentation '{}'", name));
}

Image8 gaussian_blur(const Image8& image, double sigma) {
  if (sigma <= 0.0 || image.data.empty()) return image;
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) sum += k[static_cast<std::size_t>(i + r)] = std::exp(-0.5 * i * i / (sigma * sigma));
  for (double& v : k) v /= sum;

  const int w = image.width, h = image.height;
  std::vector<double> tmp(image.data.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double s = 0.0;
        for (int i = -r; i <= r; ++i) s += k[static_cast<std::size_t>(i + r)] * image.at(clamp_index(x + i, w), y)[c];
        tmp[(static_cast<std::size_t>(y) * w + x) * 3 + c] = s;
      }
    }
  }
  Image8 out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double s = 0.0;
        for (int i = -r; i <= r; ++i) {
          s += k[static_cast<std::size_t>(i + r)] * tmp[(static_cast<std::size_t>(clamp_index(y + i, h)) * w + x) * 3 + c];
        }
        out.at(x, y)[c] = clamp_byte(s);
      }
    }
  }
  return out;
}

Image8 defocus(const Image8& image, double radius) {
  if (radius <= 0.0 || image.data.empty()) return image;
  const int r = static_cast<int>(std::floor(radius));
  std::vector<std::pair<int, int>> taps;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      if (dx * dx + dy * dy <= radius * radius) taps.emplace_back(dx, dy);
    }
  }
  const double inv = 1.0 / static_cast<double>(taps.size());
  const int w = image.width, h = image.height;
  Image8 out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s[3] = {0.0, 0.0, 0.0};
      for (const auto& [dx, dy] : taps) {
        const std::uint8_t* p = image.at(clamp_index(x + dx, w), clamp_index(y + dy, h));
        s[0] += p[0];
        s[1] += p[1];
        s[2] += p[2];
      }
      for (int c = 0; c < 3; ++c) out.at(x, y)[c] = clamp_byte(s[c] * inv);
    }
  }
  return out;
}

Image8 color_jitter(const Image8& image, double brightness, double contrast, double saturation) {
  if (image.data.empty()) return image;
  const std::size_t n = image.pixel_count();
  std::vector<double> v(image.data.begin(), image.data.end());
  for (double& x : v) x *= brightness;
  double mean_gray = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean_gray += 0.299 * v[3 * i] + 0.587 * v[3 * i + 1] + 0.114 * v[3 * i + 2];
  mean_gray /= static_cast<double>(n);
  Image8 out(image.width, image.height);
  for (std::size_t i = 0; i < n; ++i) {
    double* p = v.data() + 3 * i;
    for (int c = 0; c < 3; ++c) p[c] = mean_gray + (p[c] - mean_gray) * contrast;
    const double gray = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    for (int c = 0; c < 3; ++c) out.data[3 * i + c] = clamp_byte(gray + (p[c] - gray) * saturation);
  }
  return out;
}

Image8 gaussian_noise(const Image8& image, double sigma, Rng& rng) {
  Image8 out = image;
  if (sigma <= 0.0) return out;
  for (auto& b : out.data) b = clamp_byte(b + rng.normal(0.0, sigma));
  return out;
}

Image8 augment(const Image8& image, const AugmentationSpec& spec, Rng& rng) {
  spec.validate();
  Image8 out = image;
  for (const AugmentTransform& t : spec.transforms) {
    const bool fire = rng.uniform() < t.probability;
    Rng local(rng.next());
    if (!fire) continue;
    switch (t.kind) {
      case AugmentKind::gaussian_blur: out = gaussian_blur(out, t.a); break;
      case AugmentKind::defocus: out = defocus(out, t.a); break;
      case AugmentKind::color_jitter: {
        const double b = jitter_multiplier(t.a, local);
        const double c = jitter_multiplier(t.b, local);
        const double s = jitter_multiplier(t.c, local);
        out = color_jitter(out, b, c, s);
        break;
      }
      case AugmentKind::gaussian_noise: out = gaussian_noise(out, t.a, local); break;
    }
  }
  return out;
}

Image8 augment(const Image8& image, const AugmentationSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  return augment(image, spec, rng);
}

}  // namespace splatsim
