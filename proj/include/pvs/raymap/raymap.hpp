#pragma once

#include "pvs/core/types.hpp"

#include <string>
#include <vector>

namespace pvs {

/// Per-pixel Pluecker ray field for one camera. Each pixel stores the moment
/// and direction of its viewing ray in the shared world frame:
///   d = R^T K^-1 (u + 0.5, v + 0.5, 1)
///   m = (-R^T t) x d
/// with (R, t) the world-to-camera pose, so -R^T t is the camera center.
/// Directions are kept unnormalized as produced; `normalized` records whether
/// a normalization pass divided (m, d) by |d|.
struct Raymap {
  int width = 0, height = 0;
  bool normalized = false;
  std::vector<double> moments;     // 3 per pixel, row-major
  std::vector<double> directions;  // 3 per pixel, row-major

  Raymap() = default;
  Raymap(int w, int h)
      : width(w), height(h), moments(size_t(w) * h * 3, 0.0), directions(size_t(w) * h * 3, 0.0) {}

  Vec3 moment(int x, int y) const {
    const size_t i = (size_t(y) * width + x) * 3;
    return {moments[i], moments[i + 1], moments[i + 2]};
  }
  Vec3 direction(int x, int y) const {
    const size_t i = (size_t(y) * width + x) * 3;
    return {directions[i], directions[i + 1], directions[i + 2]};
  }
  void set(int x, int y, const Vec3& m, const Vec3& d) {
    const size_t i = (size_t(y) * width + x) * 3;
    moments[i] = m.x();
    moments[i + 1] = m.y();
    moments[i + 2] = m.z();
    directions[i] = d.x();
    directions[i + 1] = d.y();
    directions[i + 2] = d.z();
  }
};

/// N raymaps stacked channel-wise: frame k occupies channels [6k, 6k+6) in
/// the order (m_x, m_y, m_z, d_x, d_y, d_z).
struct RaymapVolume {
  int width = 0, height = 0;
  int frames = 0;
  std::vector<double> data;  // frame-major, per-pixel channel-minor

  size_t frame_stride() const { return size_t(width) * height * 6; }
};

/// Builds the Pluecker raymap of a pose. When out_width/out_height differ
/// from the intrinsics' native raster size, the intrinsics are rescaled so
/// the pixel grid covers the same field of view.
Raymap pose_to_raymap(const CameraPose& pose, const CameraIntrinsics& intrinsics, int out_width,
                      int out_height);

/// Divides (m, d) by |d| per pixel; flags the raymap as normalized.
Raymap normalize_raymap(const Raymap& raymap);

/// True iff per-pixel (m, d) pairs agree up to a common positive scale
/// within tolerance (projective Pluecker equivalence, orientation-aware).
bool raymap_equivalence_check(const Raymap& a, const Raymap& b, double tol = 1e-6);

RaymapVolume stack_raymaps(const std::vector<CameraPose>& poses, const CameraIntrinsics& intrinsics,
                           int out_width, int out_height);

/// Extracts frame k of a volume as a standalone raymap (bit-exact slices).
Raymap volume_slice(const RaymapVolume& volume, int frame);

/// Alternate 4-channel encoding: per pixel the pure quaternion
/// (0, d_x, d_y, d_z) of the ray direction.
std::vector<double> direction_quaternion_encoding(const Raymap& raymap);

/// Raymap container: magic "PLKR", u32 width/height/frames, then
/// little-endian f32 data frame-major, channel-minor. A JSON sidecar at
/// path + ".json" records pose provenance when poses are supplied.
void write_raymap_volume(const std::string& path, const RaymapVolume& volume,
                         const std::vector<CameraPose>& provenance = {});
RaymapVolume read_raymap_volume(const std::string& path);

}  // namespace pvs
