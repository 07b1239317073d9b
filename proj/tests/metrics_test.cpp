#include <doctest.h>

#include <cmath>

#include "splatsim/core/error.hpp"
#include "splatsim/eval/metrics.hpp"
#include "metric_oracles.hpp"
#include "test_util.hpp"

using namespace splatsim;
using namespace splatsim::testing;

TEST_CASE("psnr of identical images is the cap") {
  Rng rng(1);
  const Image8 a = random_image(17, 9, rng);
  CHECK(psnr(a, a) == kPsnrCap);
}

TEST_CASE("psnr of a uniform 16-level offset") {
  Image8 a(64, 48, 100), b(64, 48, 116);
  const double expected = 20.0 * std::log10(255.0 / 16.0);
  // 20 log10(255/16) = 24.048 dB.
  CHECK(std::abs(psnr(a, b) - 24.048) <= 0.01);
  CHECK(psnr(a, b) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("psnr and ssim match brute-force recomputation on random pairs") {
  Rng rng(2);
  double worst_psnr = 0, worst_ssim = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 11 + static_cast<int>(rng.below(30)), h = 11 + static_cast<int>(rng.below(20));
    const Image8 a = random_image(w, h, rng);
    const Image8 b = trial % 2 ? random_image(w, h, rng) : perturbed(a, rng, 1 + static_cast<int>(rng.below(40)));
    worst_psnr = std::max(worst_psnr, std::abs(psnr(a, b) - oracle_psnr(a, b)));
    worst_ssim = std::max(worst_ssim, std::abs(ssim(a, b) - oracle_ssim(a, b)));
    CHECK(std::abs(ssim(a, b) - ssim(b, a)) <= 1e-12);
    CHECK(ssim(a, b) <= 1.0);
    CHECK(ssim(a, b) >= -1.0);
    CHECK(psnr(a, b) >= 0.0);
  }
  MESSAGE("worst psnr diff " << worst_psnr << ", worst ssim diff " << worst_ssim);
  CHECK(worst_psnr <= 1e-9);
  CHECK(worst_ssim <= 1e-9);
}

TEST_CASE("ssim of identical images is one and of an inverted pattern is negative") {
  Rng rng(3);
  const Image8 a = random_image(40, 30, rng);
  CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));

  Image8 checker(48, 48);
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 48; ++x) {
      const std::uint8_t v = ((x / 4 + y / 4) % 2) ? 230 : 25;
      checker.at(x, y)[0] = checker.at(x, y)[1] = checker.at(x, y)[2] = v;
    }
  }
  Image8 inverted = checker;
  for (auto& v : inverted.data) v = static_cast<std::uint8_t>(255 - v);
  MESSAGE("ssim(checker, inverted) = " << ssim(checker, inverted));
  CHECK(ssim(checker, inverted) < 0.0);
}

TEST_CASE("metric argument errors") {
  Image8 a(20, 20), b(21, 20), tiny(10, 20);
  CHECK_THROWS_AS(psnr(a, b), Error);
  CHECK_THROWS_AS(ssim(a, b), Error);
  CHECK_THROWS_AS(ssim(tiny, tiny), Error);
  CHECK_THROWS_AS(psnr(Image8(), Image8()), Error);
}
