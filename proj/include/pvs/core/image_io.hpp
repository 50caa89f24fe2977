#pragma once

#include "pvs/core/types.hpp"

#include <string>
#include <vector>

namespace pvs {

/// Raw raster as read from disk, values already normalized to [0, 1].
struct RasterImage {
  int width = 0, height = 0, channels = 0;
  std::vector<float> data;

  float at(int x, int y, int c) const { return data[(size_t(y) * width + x) * channels + c]; }
};

RasterImage read_png(const std::string& path);

/// Writes a [0, 1] raster as PNG; bit_depth must be 8 or 16.
void write_png(const std::string& path, const RasterImage& image, int bit_depth = 8);

void write_png(const std::string& path, const PanoramaImage& image, int bit_depth = 8);
void write_png(const std::string& path, const PerspectiveImage& image, int bit_depth = 8);

/// Writes a boolean mask as an 8-bit grayscale PNG (255 = set).
void write_mask_png(const std::string& path, const std::vector<uint8_t>& mask, int width,
                    int height);

PanoramaImage read_panorama_png(const std::string& path);
PerspectiveImage read_perspective_png(const std::string& path);

/// PFM depth I/O: "Pf" grayscale, little-endian (scale header -1.0),
/// scanlines stored bottom-up per the format.
DepthMap read_pfm(const std::string& path, double max_depth);
void write_pfm(const std::string& path, const DepthMap& depth);

}  // namespace pvs
