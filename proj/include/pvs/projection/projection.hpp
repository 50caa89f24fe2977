#pragma once

#include "pvs/core/types.hpp"

#include <utility>
#include <vector>

namespace pvs {

// ---------------------------------------------------------------------------
// View geometry
//
// World frame: x forward (longitude 0), y toward longitude +90 deg, z up.
// Camera frame: x along the optical axis, y toward decreasing image column,
// z toward decreasing image row, so (image right, image down, optical axis)
// = (-y, -z, x) is a proper right-handed pinhole triple. Equirectangular
// mapping: column u covers longitude (u / W - 0.5) * 2*pi, row v covers
// latitude (0.5 - v / H) * pi, so the top raster row is the zenith. Pixel
// (u, v) samples continuous coordinate (u + 0.5, v + 0.5).
// ---------------------------------------------------------------------------

struct ViewWindow {
  double yaw = 0.0;    // radians, wrapped into [-pi, pi)
  double pitch = 0.0;  // radians, in [-pi/2, pi/2]
  double hfov = 0.0;   // radians, in (0, pi)
  double vfov = 0.0;   // radians, in (0, pi)
  int out_width = 0;
  int out_height = 0;

  /// Validating constructor; yaw is wrapped, everything else must be in
  /// range. vfov <= 0 derives the square-pixel vertical fov
  /// 2*atan(tan(hfov/2) * H / W).
  static ViewWindow make(double yaw, double pitch, double hfov, double vfov, int out_width,
                         int out_height);

  void validate() const;
};

struct VisibilityMask {
  int width = 0, height = 0;
  std::vector<uint8_t> data;

  VisibilityMask() = default;
  VisibilityMask(int w, int h) : width(w), height(h), data(size_t(w) * h, 0) {}

  bool at(int x, int y) const { return data[size_t(y) * width + x] != 0; }
  void set(int x, int y, bool v) { data[size_t(y) * width + x] = v ? 1 : 0; }

  size_t count() const;
};

/// Camera-to-world rotation of a view window: R_z(yaw) applied after the
/// pitch tilt, so the optical axis maps to
/// (cos yaw cos pitch, sin yaw cos pitch, sin pitch).
Mat3 window_rotation(const ViewWindow& window);

/// Unit view direction (world frame) for a yaw/pitch pair.
Vec3 sphere_direction(double lon, double lat);

/// Continuous equirectangular coordinates of a world direction.
void direction_to_pano(const Vec3& dir_world, int pano_width, int pano_height, double* u,
                       double* v);

/// True when a camera-frame vector lies inside the window frustum:
/// x > 0, |y / x| < tan(hfov / 2), |z / x| < tan(vfov / 2).
bool window_sees(const ViewWindow& window, const Vec3& x_cam);

struct ProjectionResult {
  PerspectiveImage image;
  VisibilityMask mask;
};

/// Renders a perspective view from an equirectangular panorama. Each output
/// pixel's camera ray is rotated into the world frame, converted to
/// longitude/latitude and bilinearly sampled with longitude wrap and
/// latitude clamp.
ProjectionResult pano_to_perspective(const PanoramaImage& pano, const ViewWindow& window);

struct SplatResult {
  PanoramaImage pano;
  VisibilityMask coverage;  // panorama-shaped
};

/// Splats a perspective view into a panorama canvas. The footprint is
/// gathered inversely: every panorama pixel inside the window frustum samples
/// the perspective image at its projection. Coverage is true exactly where
/// the frustum predicate holds and the sampled pixels are valid.
SplatResult perspective_to_pano(const PerspectiveImage& persp, const ViewWindow& window,
                                const PanoramaImage& canvas);

SplatResult perspective_to_pano(const PerspectiveImage& persp, const ViewWindow& window,
                                int canvas_width, int canvas_height);

struct PanoramaSplit {
  std::vector<std::pair<PerspectiveImage, ViewWindow>> views;
  bool full_coverage = false;  // n * hfov * (1 - overlap) >= 2*pi
};

/// Divides a panorama into n_views perspective views with yaw centers
/// uniformly spaced at 2*pi / n_views. overlap_fraction declares the intended
/// footprint overlap between neighbors and feeds the coverage flag.
/// out_width/out_height <= 0 derive a square view spanning hfov worth of
/// panorama columns.
PanoramaSplit split_panorama(const PanoramaImage& pano, int n_views, double overlap_fraction,
                             double hfov, int out_width = 0, int out_height = 0);

/// The six axis-aligned 90-degree windows (front, right, back, left, top,
/// bottom). fov_padding widens each half-fov, keeping seams covered after
/// rasterization.
std::vector<ViewWindow> canonical_cube_windows(int face_size, double fov_padding = 0.0);

}  // namespace pvs
