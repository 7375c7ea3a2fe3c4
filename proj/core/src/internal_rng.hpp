#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace ntp::internal {

// Unbiased draw from [0, n) on the raw 64-bit stream; immune to stdlib
// distribution differences.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % n);
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % n;
}

}  // namespace ntp::internal
