#pragma once

#include <cstdint>
#include <cmath>

namespace pvs {

/// Counter-based random generator: every draw is a pure function of
/// (seed, stream, step, index), so results are reproducible regardless of
/// evaluation order or thread schedule.
struct CounterRng {
  uint64_t seed = 0;

  static uint64_t mix(uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  uint64_t bits(uint64_t stream, uint64_t step, uint64_t index) const {
    uint64_t h = mix(seed ^ 0x6a09e667f3bcc909ull);
    h = mix(h ^ stream);
    h = mix(h ^ step);
    h = mix(h ^ index);
    return h;
  }

  /// Uniform draw in (0, 1].
  double uniform_pos(uint64_t stream, uint64_t step, uint64_t index) const {
    return ((bits(stream, step, index) >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform draw in [0, 1).
  double uniform(uint64_t stream, uint64_t step, uint64_t index) const {
    return (bits(stream, step, index) >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller on two decorrelated lanes.
  double normal(uint64_t stream, uint64_t step, uint64_t index) const {
    const double u1 = uniform_pos(stream, step, index * 2);
    const double u2 = uniform(stream, step, index * 2 + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }
};

}  // namespace pvs
