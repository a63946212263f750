#pragma once

#include <array>
#include <cstdint>

#include "tqm/types.hpp"

namespace tqm {

// Counter-based generator (splitmix64 finalizer). Each draw is a pure
// function of (seed, stream, index), so sweeps can be evaluated in any
// order, or in parallel, and still reproduce bit-identical values.
struct CounterRng {
  std::uint64_t seed = 0;

  static std::uint64_t finalize(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t bits(std::uint64_t stream, std::uint64_t index) const {
    return finalize(finalize(seed ^ (stream * 0x9e3779b97f4a7c15ull)) + index);
  }

  // Uniform in [0, 1).
  double uniform(std::uint64_t stream, std::uint64_t index) const {
    return static_cast<double>(bits(stream, index) >> 11) * 0x1.0p-53;
  }

  // Haar-uniform qubit amplitudes (alpha, beta), global phase fixed to
  // make alpha real and nonnegative.
  std::array<cxd, 2> qubit(std::uint64_t stream, std::uint64_t index) const {
    const double u = uniform(stream, 2 * index);
    const double v = uniform(stream, 2 * index + 1);
    const double theta = std::acos(1.0 - 2.0 * u);
    const double phi = 2.0 * kPi * v;
    return {cxd{std::cos(theta / 2.0), 0.0}, std::polar(std::sin(theta / 2.0), phi)};
  }
};

}  // namespace tqm
