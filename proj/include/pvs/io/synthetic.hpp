#pragma once

#include "pvs/core/types.hpp"

#include <cstdint>

namespace pvs {

/// Smooth low-frequency test panorama: a deterministic sum of spherical
/// harmonics-like sinusoids in longitude/latitude, wrap-continuous, mapped
/// into [0, 1].
PanoramaImage band_limited_panorama(int width, int height, int channels, int harmonics = 3,
                                    uint64_t seed = 7);

/// Panorama whose channels are the spherical coordinates themselves:
/// (lon / 2pi + 0.5, lat / pi + 0.5, 0). Linear in the equirectangular grid,
/// so bilinear resampling reproduces it exactly away from the wrap seam.
PanoramaImage coordinate_panorama(int width, int height);

/// Colorful cylindrical-room pattern with smooth walls, floor and ceiling
/// bands; the bundled demo scene.
PanoramaImage room_panorama(int width, int height);

/// Boundary-distance depth maps over the panorama grid.
DepthMap circular_room_depth(int width, int height, double radius, double max_depth);
DepthMap square_room_depth(int width, int height, double half_side, double max_depth);

/// Constant perspective-view depth.
DepthMap constant_depth(int width, int height, double depth, double max_depth);

}  // namespace pvs
