#include "splatsim/core/image.hpp"

#include <algorithm>
#include <cmath>

namespace splatsim {

std::uint8_t to_byte(double v) {
  if (!(v > 0.0)) return 0;
  return static_cast<std::uint8_t>(std::lround(std::min(v, 1.0) * 255.0));
}

}  // namespace splatsim
