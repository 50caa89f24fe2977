#include "pvs/io/synthetic.hpp"

#include "pvs/sampler/rng.hpp"

#include <cmath>

namespace pvs {

PanoramaImage band_limited_panorama(int width, int height, int channels, int harmonics,
                                    uint64_t seed) {
  const CounterRng rng{seed};
  PanoramaImage pano(width, height, channels);
  for (int y = 0; y < height; ++y) {
    const double lat = (0.5 - (y + 0.5) / height) * kPi;
    for (int x = 0; x < width; ++x) {
      const double lon = ((x + 0.5) / width - 0.5) * 2.0 * kPi;
      for (int c = 0; c < channels; ++c) {
        double v = 0.0;
        for (int k = 1; k <= harmonics; ++k) {
          const double pa = rng.uniform(c, k, 0) * 2.0 * kPi;
          const double pb = rng.uniform(c, k, 1) * 2.0 * kPi;
          const double wa = rng.uniform(c, k, 2);
          // Integer longitude frequency keeps the wrap seam continuous.
          v += wa * std::sin(k * lon + pa) * std::cos(k * lat + pb);
        }
        pano.at(x, y, c) = float(0.5 + 0.5 * std::tanh(v));
      }
    }
  }
  return pano;
}

PanoramaImage coordinate_panorama(int width, int height) {
  PanoramaImage pano(width, height, 3);
  for (int y = 0; y < height; ++y) {
    const double lat = (0.5 - (y + 0.5) / height) * kPi;
    for (int x = 0; x < width; ++x) {
      const double lon = ((x + 0.5) / width - 0.5) * 2.0 * kPi;
      pano.at(x, y, 0) = float(lon / (2.0 * kPi) + 0.5);
      pano.at(x, y, 1) = float(lat / kPi + 0.5);
      pano.at(x, y, 2) = 0.0f;
    }
  }
  return pano;
}

PanoramaImage room_panorama(int width, int height) {
  PanoramaImage pano(width, height, 3);
  for (int y = 0; y < height; ++y) {
    const double lat = (0.5 - (y + 0.5) / height) * kPi;
    for (int x = 0; x < width; ++x) {
      const double lon = ((x + 0.5) / width - 0.5) * 2.0 * kPi;
      // Wall stripes, a floor gradient and a ceiling tint.
      const double wall = 0.5 + 0.35 * std::sin(4.0 * lon) * std::cos(2.0 * lat);
      const double floor_band = 0.5 + 0.5 * std::tanh(-4.0 * (lat + 0.6));
      const double ceil_band = 0.5 + 0.5 * std::tanh(4.0 * (lat - 0.6));
      pano.at(x, y, 0) = float(0.2 + 0.6 * wall);
      pano.at(x, y, 1) = float(0.15 + 0.5 * floor_band + 0.2 * std::cos(3.0 * lon) * 0.5);
      pano.at(x, y, 2) = float(0.2 + 0.6 * ceil_band);
    }
  }
  return pano;
}

DepthMap circular_room_depth(int width, int height, double radius, double max_depth) {
  DepthMap depth(width, height, max_depth);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) depth.at(x, y) = float(radius);
  return depth;
}

DepthMap square_room_depth(int width, int height, double half_side, double max_depth) {
  DepthMap depth(width, height, max_depth);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double lon = ((x + 0.5) / width - 0.5) * 2.0 * kPi;
      // Horizontal distance from the center to the axis-aligned square wall.
      const double c = std::abs(std::cos(lon));
      const double s = std::abs(std::sin(lon));
      depth.at(x, y) = float(half_side / std::max(c, s));
    }
  }
  return depth;
}

DepthMap constant_depth(int width, int height, double depth_value, double max_depth) {
  DepthMap depth(width, height, max_depth);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) depth.at(x, y) = float(depth_value);
  return depth;
}

}  // namespace pvs
