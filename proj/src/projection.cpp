#include "pvs/projection/projection.hpp"

#include "pvs/core/parallel.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pvs {

ViewWindow ViewWindow::make(double yaw, double pitch, double hfov, double vfov, int out_width,
                            int out_height) {
  ViewWindow w;
  w.yaw = wrap_angle(yaw);
  w.pitch = pitch;
  w.hfov = hfov;
  w.vfov = vfov > 0.0 ? vfov
                      : 2.0 * std::atan(std::tan(hfov / 2.0) * double(out_height) / out_width);
  w.out_width = out_width;
  w.out_height = out_height;
  w.validate();
  return w;
}

void ViewWindow::validate() const {
  if (!(yaw >= -kPi && yaw < kPi)) throw std::invalid_argument("ViewWindow: yaw outside [-pi, pi)");
  if (!(pitch >= -kPi / 2.0 && pitch <= kPi / 2.0))
    throw std::invalid_argument("ViewWindow: pitch outside [-pi/2, pi/2]");
  if (!(hfov > 0.0 && hfov < kPi)) throw std::invalid_argument("ViewWindow: hfov outside (0, pi)");
  if (!(vfov > 0.0 && vfov < kPi)) throw std::invalid_argument("ViewWindow: vfov outside (0, pi)");
  if (out_width <= 0 || out_height <= 0)
    throw std::invalid_argument("ViewWindow: output size must be positive");
}

size_t VisibilityMask::count() const {
  size_t n = 0;
  for (uint8_t v : data) n += v != 0;
  return n;
}

Mat3 window_rotation(const ViewWindow& window) {
  const double ct = std::cos(window.yaw), st = std::sin(window.yaw);
  const double cp = std::cos(window.pitch), sp = std::sin(window.pitch);
  Mat3 yaw_z, pitch_y;
  yaw_z << ct, -st, 0.0, st, ct, 0.0, 0.0, 0.0, 1.0;
  // Tilt about the camera y axis; positive pitch lifts the optical axis.
  pitch_y << cp, 0.0, -sp, 0.0, 1.0, 0.0, sp, 0.0, cp;
  return yaw_z * pitch_y;
}

Vec3 sphere_direction(double lon, double lat) {
  const double cl = std::cos(lat);
  return {std::cos(lon) * cl, std::sin(lon) * cl, std::sin(lat)};
}

void direction_to_pano(const Vec3& dir_world, int pano_width, int pano_height, double* u,
                       double* v) {
  const Vec3 d = dir_world.normalized();
  const double lat = std::asin(std::min(1.0, std::max(-1.0, d.z())));
  const double lon = std::atan2(d.y(), d.x());
  *u = (lon / (2.0 * kPi) + 0.5) * pano_width;
  *v = (-lat / kPi + 0.5) * pano_height;
}

bool window_sees(const ViewWindow& window, const Vec3& x_cam) {
  if (!(x_cam.x() > 0.0)) return false;
  const double wl = std::tan(window.hfov / 2.0);
  const double hl = std::tan(window.vfov / 2.0);
  return std::abs(x_cam.y() / x_cam.x()) < wl && std::abs(x_cam.z() / x_cam.x()) < hl;
}

ProjectionResult pano_to_perspective(const PanoramaImage& pano, const ViewWindow& window) {
  window.validate();
  const ValidationReport report = validate_panorama(pano);
  if (!report.ok()) throw std::invalid_argument("pano_to_perspective: " + report.violations.front());

  const int w = window.out_width, h = window.out_height, c = pano.channels;
  ProjectionResult result{PerspectiveImage(w, h, c), VisibilityMask(w, h)};
  const Mat3 rot = window_rotation(window);
  const double wl = std::tan(window.hfov / 2.0);
  const double hl = std::tan(window.vfov / 2.0);

  parallel_rows(h, [&](int y) {
    for (int x = 0; x < w; ++x) {
      const double ry = -(2.0 * (x + 0.5) / w - 1.0) * wl;
      const double rz = -(2.0 * (y + 0.5) / h - 1.0) * hl;
      const Vec3 dir_world = rot * Vec3(1.0, ry, rz);
      double up, vp;
      direction_to_pano(dir_world, pano.width, pano.height, &up, &vp);
      for (int k = 0; k < c; ++k)
        result.image.at(x, y, k) = static_cast<float>(pano.sample_bilinear(up - 0.5, vp - 0.5, k));
      result.mask.set(x, y, true);
    }
  });
  return result;
}

SplatResult perspective_to_pano(const PerspectiveImage& persp, const ViewWindow& window,
                                const PanoramaImage& canvas) {
  window.validate();
  if (persp.width != window.out_width || persp.height != window.out_height)
    throw std::invalid_argument("perspective_to_pano: image does not match window size");
  if (canvas.channels != persp.channels)
    throw std::invalid_argument("perspective_to_pano: channel mismatch with canvas");

  SplatResult result{canvas, VisibilityMask(canvas.width, canvas.height)};
  const Mat3 rot_t = window_rotation(window).transpose();
  const double wl = std::tan(window.hfov / 2.0);
  const double hl = std::tan(window.vfov / 2.0);
  const int pw = canvas.width, ph = canvas.height, c = canvas.channels;
  const int w = persp.width, h = persp.height;

  parallel_rows(ph, [&](int y) {
    std::vector<double> sample(c);
    const double lat = (0.5 - (y + 0.5) / ph) * kPi;
    for (int x = 0; x < pw; ++x) {
      const double lon = ((x + 0.5) / pw - 0.5) * 2.0 * kPi;
      const Vec3 x_cam = rot_t * sphere_direction(lon, lat);
      if (!(x_cam.x() > 0.0)) continue;
      const double py = x_cam.y() / x_cam.x();
      const double pz = x_cam.z() / x_cam.x();
      if (!(std::abs(py) < wl && std::abs(pz) < hl)) continue;
      const double u = -w * py / (2.0 * wl) + w / 2.0;
      const double v = -h * pz / (2.0 * hl) + h / 2.0;
      if (!persp.sample_bilinear(u - 0.5, v - 0.5, sample.data())) continue;
      for (int k = 0; k < c; ++k) result.pano.at(x, y, k) = static_cast<float>(sample[k]);
      result.coverage.set(x, y, true);
    }
  });
  return result;
}

SplatResult perspective_to_pano(const PerspectiveImage& persp, const ViewWindow& window,
                                int canvas_width, int canvas_height) {
  return perspective_to_pano(persp, window, PanoramaImage(canvas_width, canvas_height, persp.channels));
}

PanoramaSplit split_panorama(const PanoramaImage& pano, int n_views, double overlap_fraction,
                             double hfov, int out_width, int out_height) {
  if (n_views < 3 || n_views > 12)
    throw std::invalid_argument("split_panorama: n_views outside [3, 12]");
  if (overlap_fraction < 0.0 || overlap_fraction > 2.0 / 3.0)
    throw std::invalid_argument("split_panorama: overlap_fraction outside [0, 2/3]");
  if (!(hfov > 0.0 && hfov < kPi)) throw std::invalid_argument("split_panorama: hfov outside (0, pi)");

  if (out_width <= 0) out_width = std::max(1, int(std::lround(hfov / (2.0 * kPi) * pano.width)));
  if (out_height <= 0) out_height = out_width;

  PanoramaSplit split;
  split.full_coverage = n_views * hfov * (1.0 - overlap_fraction) >= 2.0 * kPi - 1e-12;
  split.views.reserve(n_views);
  for (int k = 0; k < n_views; ++k) {
    const double yaw = 2.0 * kPi * k / n_views;
    const ViewWindow window = ViewWindow::make(yaw, 0.0, hfov, 0.0, out_width, out_height);
    split.views.emplace_back(pano_to_perspective(pano, window).image, window);
  }
  return split;
}

std::vector<ViewWindow> canonical_cube_windows(int face_size, double fov_padding) {
  const double fov = kPi / 2.0 + 2.0 * fov_padding;
  const double face[6][2] = {
      {0.0, 0.0},          // front
      {kPi / 2.0, 0.0},    // right
      {kPi, 0.0},          // back
      {3.0 * kPi / 2.0, 0.0},  // left
      {0.0, kPi / 2.0},    // top
      {0.0, -kPi / 2.0},   // bottom
  };
  std::vector<ViewWindow> windows;
  windows.reserve(6);
  for (const auto& f : face)
    windows.push_back(ViewWindow::make(f[0], f[1], fov, fov, face_size, face_size));
  return windows;
}

}  // namespace pvs
