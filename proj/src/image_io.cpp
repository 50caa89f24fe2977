#include "pvs/core/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>

namespace pvs {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

[[noreturn]] void fail(const std::string& path, const char* what) {
  throw std::runtime_error(path + ": " + what);
}

float clamp01(float v) { return v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v); }

}  // namespace

RasterImage read_png(const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) fail(path, "cannot open for reading");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail(path, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(path, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(path, "libpng error while reading");
  }

  png_init_io(png, file.get());
  png_read_info(png, info);

  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (bit_depth == 16) png_set_swap(png);  // stored big-endian
  png_read_update_info(png, info);

  RasterImage out;
  out.width = int(png_get_image_width(png, info));
  out.height = int(png_get_image_height(png, info));
  out.channels = int(png_get_channels(png, info));
  const int depth = png_get_bit_depth(png, info);
  const size_t row_bytes = png_get_rowbytes(png, info);

  std::vector<uint8_t> raw(row_bytes * out.height);
  std::vector<png_bytep> rows(out.height);
  for (int y = 0; y < out.height; ++y) rows[y] = raw.data() + row_bytes * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  out.data.resize(size_t(out.width) * out.height * out.channels);
  const size_t n = out.data.size();
  if (depth == 16) {
    const uint16_t* src = reinterpret_cast<const uint16_t*>(raw.data());
    for (size_t i = 0; i < n; ++i) out.data[i] = src[i] / 65535.0f;
  } else {
    for (size_t i = 0; i < n; ++i) out.data[i] = raw[i] / 255.0f;
  }
  return out;
}

void write_png(const std::string& path, const RasterImage& image, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16)
    throw std::invalid_argument("write_png: bit depth must be 8 or 16");
  if (image.channels < 1 || image.channels > 4)
    throw std::invalid_argument("write_png: unsupported channel count");

  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) fail(path, "cannot open for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail(path, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail(path, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(path, "libpng error while writing");
  }

  const int color_type = image.channels == 1   ? PNG_COLOR_TYPE_GRAY
                         : image.channels == 2 ? PNG_COLOR_TYPE_GRAY_ALPHA
                         : image.channels == 3 ? PNG_COLOR_TYPE_RGB
                                               : PNG_COLOR_TYPE_RGBA;
  png_init_io(png, file.get());
  png_set_IHDR(png, info, image.width, image.height, bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);

  const size_t n = size_t(image.width) * image.height * image.channels;
  if (bit_depth == 16) {
    std::vector<uint16_t> raw(n);
    for (size_t i = 0; i < n; ++i)
      raw[i] = static_cast<uint16_t>(std::lround(clamp01(image.data[i]) * 65535.0f));
    std::vector<png_bytep> rows(image.height);
    for (int y = 0; y < image.height; ++y)
      rows[y] = reinterpret_cast<png_bytep>(raw.data() + size_t(y) * image.width * image.channels);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
  } else {
    std::vector<uint8_t> raw(n);
    for (size_t i = 0; i < n; ++i)
      raw[i] = static_cast<uint8_t>(std::lround(clamp01(image.data[i]) * 255.0f));
    std::vector<png_bytep> rows(image.height);
    for (int y = 0; y < image.height; ++y)
      rows[y] = raw.data() + size_t(y) * image.width * image.channels;
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
  }
  png_destroy_write_struct(&png, &info);
}

void write_png(const std::string& path, const PanoramaImage& image, int bit_depth) {
  RasterImage raster{image.width, image.height, image.channels, image.data};
  write_png(path, raster, bit_depth);
}

void write_png(const std::string& path, const PerspectiveImage& image, int bit_depth) {
  RasterImage raster{image.width, image.height, image.channels, image.data};
  write_png(path, raster, bit_depth);
}

void write_mask_png(const std::string& path, const std::vector<uint8_t>& mask, int width,
                    int height) {
  RasterImage raster;
  raster.width = width;
  raster.height = height;
  raster.channels = 1;
  raster.data.resize(mask.size());
  for (size_t i = 0; i < mask.size(); ++i) raster.data[i] = mask[i] ? 1.0f : 0.0f;
  write_png(path, raster, 8);
}

PanoramaImage read_panorama_png(const std::string& path) {
  const RasterImage raster = read_png(path);
  PanoramaImage pano(raster.width, raster.height, raster.channels);
  pano.data = raster.data;
  return pano;
}

PerspectiveImage read_perspective_png(const std::string& path) {
  const RasterImage raster = read_png(path);
  PerspectiveImage persp(raster.width, raster.height, raster.channels);
  persp.data = raster.data;
  return persp;
}

DepthMap read_pfm(const std::string& path, double max_depth) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) fail(path, "cannot open for reading");

  char magic[3] = {0, 0, 0};
  int width = 0, height = 0;
  double scale = 0.0;
  if (std::fscanf(file.get(), "%2s %d %d %lf", magic, &width, &height, &scale) != 4)
    fail(path, "malformed PFM header");
  if (std::strcmp(magic, "Pf") != 0) fail(path, "only grayscale PFM is supported");
  if (scale >= 0.0) fail(path, "big-endian PFM is not supported");
  std::fgetc(file.get());  // single whitespace after header

  DepthMap depth(width, height, max_depth);
  std::vector<float> row(width);
  for (int y = height - 1; y >= 0; --y) {  // PFM scanlines run bottom-up
    if (std::fread(row.data(), sizeof(float), width, file.get()) != size_t(width))
      fail(path, "truncated PFM data");
    std::copy(row.begin(), row.end(), depth.data.begin() + size_t(y) * width);
  }
  return depth;
}

void write_pfm(const std::string& path, const DepthMap& depth) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) fail(path, "cannot open for writing");
  std::fprintf(file.get(), "Pf\n%d %d\n-1.0\n", depth.width, depth.height);
  for (int y = depth.height - 1; y >= 0; --y) {
    if (std::fwrite(depth.data.data() + size_t(y) * depth.width, sizeof(float), depth.width,
                    file.get()) != size_t(depth.width))
      fail(path, "short write");
  }
}

}  // namespace pvs
