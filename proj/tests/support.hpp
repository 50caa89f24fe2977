#pragma once

#include "pvs/core/types.hpp"
#include "pvs/sampler/rng.hpp"

#include <cmath>
#include <vector>

namespace pvs::test {

/// Deterministic random unit quaternion (uniform via normalized Gaussians).
inline Quat random_quat(const CounterRng& rng, uint64_t index) {
  const Quat q{rng.normal(10, index, 0), rng.normal(10, index, 1), rng.normal(10, index, 2),
               rng.normal(10, index, 3)};
  return q.normalized();
}

inline Vec3 random_vec3(const CounterRng& rng, uint64_t index, double scale = 1.0) {
  return {scale * rng.normal(11, index, 0), scale * rng.normal(11, index, 1),
          scale * rng.normal(11, index, 2)};
}

inline CameraPose random_pose(const CounterRng& rng, uint64_t index, double translation_scale = 1.0) {
  return CameraPose(random_quat(rng, index), random_vec3(rng, index, translation_scale));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace pvs::test
