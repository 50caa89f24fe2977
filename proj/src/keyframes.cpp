#include "pvs/keyframes/keyframes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pvs {

WindowCamera window_camera(const ViewWindow& window) {
  window.validate();
  const Mat3 rot = window_rotation(window);
  Mat3 cam_to_world;
  cam_to_world.col(0) = rot * Vec3(0.0, -1.0, 0.0);  // image right
  cam_to_world.col(1) = rot * Vec3(0.0, 0.0, -1.0);  // image down
  cam_to_world.col(2) = rot * Vec3(1.0, 0.0, 0.0);   // optical axis

  WindowCamera cam;
  cam.pose = CameraPose(Quat::from_matrix(cam_to_world.transpose()), Vec3::Zero());
  cam.intrinsics = {window.out_width / 2.0 / std::tan(window.hfov / 2.0),
                    window.out_height / 2.0 / std::tan(window.vfov / 2.0),
                    window.out_width / 2.0,
                    window.out_height / 2.0,
                    window.out_width,
                    window.out_height};
  return cam;
}

double walk_in_scale(double target_distance, double depth_max, double focal, double hfov) {
  if (!(depth_max > 0.0)) throw std::invalid_argument("walk_in_scale: depth_max must be positive");
  if (!(focal > 0.0)) throw std::invalid_argument("walk_in_scale: focal must be positive");
  if (!(hfov > 0.0 && hfov < kPi)) throw std::invalid_argument("walk_in_scale: hfov outside (0, pi)");
  if (target_distance < 0.0) throw std::invalid_argument("walk_in_scale: negative target distance");
  const double c = target_distance / depth_max;
  if (c >= 1.0) throw std::invalid_argument("walk_in_scale: c >= 1 is singular");
  return focal / std::tan((1.0 - c) * hfov / 2.0);
}

namespace {

std::vector<uint8_t> dilate3x3(const std::vector<uint8_t>& in, int w, int h) {
  std::vector<uint8_t> out(in.size(), 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      bool any = false;
      for (int dy = -1; dy <= 1 && !any; ++dy)
        for (int dx = -1; dx <= 1 && !any; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx >= 0 && nx < w && ny >= 0 && ny < h && in[size_t(ny) * w + nx]) any = true;
        }
      out[size_t(y) * w + x] = any ? 1 : 0;
    }
  return out;
}

std::vector<uint8_t> erode3x3(const std::vector<uint8_t>& in, int w, int h) {
  std::vector<uint8_t> out(in.size(), 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      bool all = true;
      for (int dy = -1; dy <= 1 && all; ++dy)
        for (int dx = -1; dx <= 1 && all; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx >= 0 && nx < w && ny >= 0 && ny < h && !in[size_t(ny) * w + nx]) all = false;
        }
      out[size_t(y) * w + x] = all ? 1 : 0;
    }
  return out;
}

}  // namespace

ForwardWarpResult forward_warp(const PerspectiveImage& source, const DepthMap& depth,
                               const CameraPose& source_pose, const CameraPose& target_pose,
                               const CameraIntrinsics& intrinsics) {
  if (depth.width != source.width || depth.height != source.height)
    throw std::invalid_argument("forward_warp: depth dimensions do not match source");
  intrinsics.validate();
  depth.validate();

  const int w = source.width, h = source.height, c = source.channels;
  const CameraPose rel = relative_pose(source_pose, target_pose);
  const Mat3 r = rel.rotation_mat();
  const Vec3 t = rel.translation;
  const Mat3 k_inv = intrinsics.inverse_matrix();

  ForwardWarpResult result;
  result.image = PerspectiveImage(w, h, c);
  std::fill(result.image.valid.begin(), result.image.valid.end(), 0);
  result.field.source_width = w;
  result.field.source_height = h;
  result.field.target_width = w;
  result.field.target_height = h;
  result.field.target_coords.assign(size_t(w) * h * 2, std::numeric_limits<double>::quiet_NaN());
  result.field.occupancy.assign(size_t(w) * h, 0);

  std::vector<double> zbuf(size_t(w) * h, std::numeric_limits<double>::infinity());
  std::vector<int64_t> zsrc(size_t(w) * h, std::numeric_limits<int64_t>::max());

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!source.is_valid(x, y)) continue;
      const double z = depth.at(x, y);
      const Vec3 p_src = z * (k_inv * Vec3(x + 0.5, y + 0.5, 1.0));
      const Vec3 p_tgt = r * p_src + t;
      if (!(p_tgt.z() > 1e-12)) continue;
      const double u = intrinsics.fx * p_tgt.x() / p_tgt.z() + intrinsics.cx;
      const double v = intrinsics.fy * p_tgt.y() / p_tgt.z() + intrinsics.cy;
      const size_t si = size_t(y) * w + x;
      result.field.target_coords[si * 2] = u;
      result.field.target_coords[si * 2 + 1] = v;

      const int ti = int(std::lround(u - 0.5));
      const int tj = int(std::lround(v - 0.5));
      if (ti < 0 || ti >= w || tj < 0 || tj >= h) continue;
      const size_t di = size_t(tj) * w + ti;
      const int64_t order = int64_t(si);
      if (p_tgt.z() < zbuf[di] || (p_tgt.z() == zbuf[di] && order < zsrc[di])) {
        zbuf[di] = p_tgt.z();
        zsrc[di] = order;
        for (int k = 0; k < c; ++k) result.image.at(ti, tj, k) = source.at(x, y, k);
        result.field.occupancy[di] = 1;
      }
    }
  }

  size_t raw_count = 0;
  for (uint8_t v : result.field.occupancy) raw_count += v != 0;
  result.all_outside = raw_count == 0;

  // Close one-pixel resampling holes and give them a neighborhood value.
  const std::vector<uint8_t> raw = result.field.occupancy;
  const std::vector<uint8_t> closed = erode3x3(dilate3x3(raw, w, h), w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t i = size_t(y) * w + x;
      if (!closed[i] || raw[i]) continue;
      for (int k = 0; k < c; ++k) {
        double sum = 0.0;
        int n = 0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx, ny = y + dy;
            if (nx >= 0 && nx < w && ny >= 0 && ny < h && raw[size_t(ny) * w + nx]) {
              sum += result.image.at(nx, ny, k);
              ++n;
            }
          }
        result.image.at(x, y, k) = n > 0 ? float(sum / n) : 0.0f;
      }
    }
  }
  result.field.occupancy = closed;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      result.image.set_valid(x, y, closed[size_t(y) * w + x] != 0);

  result.inpaint_mask.resize(closed.size());
  for (size_t i = 0; i < closed.size(); ++i) result.inpaint_mask[i] = closed[i] ? 0 : 1;
  return result;
}

std::vector<KeyframePair> build_neighboring_pairs(const PanoramaImage& pano, int n_views,
                                                  double overlap_fraction, double hfov) {
  if (n_views < 3 || n_views > 12)
    throw std::invalid_argument("build_neighboring_pairs: n_views outside [3, 12]");
  if (overlap_fraction < 0.0 || overlap_fraction > 2.0 / 3.0)
    throw std::invalid_argument("build_neighboring_pairs: overlap_fraction outside [0, 2/3]");
  if (!(hfov > 0.0 && hfov < kPi))
    throw std::invalid_argument("build_neighboring_pairs: hfov outside (0, pi)");

  const double spacing = hfov * (1.0 - overlap_fraction);
  const bool closes = std::abs(n_views * spacing - 2.0 * kPi) <= 1e-9;
  const int out_size = std::max(1, int(std::lround(hfov / (2.0 * kPi) * pano.width)));

  std::vector<ViewWindow> windows;
  std::vector<PerspectiveImage> views;
  for (int k = 0; k < n_views; ++k) {
    const ViewWindow window = ViewWindow::make(k * spacing, 0.0, hfov, 0.0, out_size, out_size);
    windows.push_back(window);
    views.push_back(pano_to_perspective(pano, window).image);
  }

  std::vector<KeyframePair> pairs;
  const int n_pairs = closes ? n_views : n_views - 1;
  for (int k = 0; k < n_pairs; ++k) {
    const int a = k, b = (k + 1) % n_views;
    KeyframePair pair;
    pair.source_image = views[a];
    pair.target_image = views[b];
    const WindowCamera cam_a = window_camera(windows[a]);
    const WindowCamera cam_b = window_camera(windows[b]);
    pair.source_pose = cam_a.pose;
    pair.target_pose = cam_b.pose;
    pair.intrinsics = cam_a.intrinsics;
    pair.relation = PairRelation::neighboring;
    pair.target_inpaint_mask.assign(size_t(out_size) * out_size, 0);  // both views fully known
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

KeyframePair build_walkin_pair(const PanoramaImage& pano, const DepthMap& source_depth,
                               const ViewWindow& window, double walk_ratio,
                               const CameraIntrinsics& intrinsics, WalkDepthMode depth_mode) {
  if (walk_ratio < 0.0 || walk_ratio >= 1.0)
    throw std::invalid_argument("build_walkin_pair: walk_ratio outside [0, 1)");
  if (source_depth.width != window.out_width || source_depth.height != window.out_height)
    throw std::invalid_argument("build_walkin_pair: depth does not match window size");

  const int w = window.out_width, h = window.out_height;
  const WindowCamera cam = window_camera(window);

  KeyframePair pair;
  pair.relation = PairRelation::walk_in;
  pair.intrinsics = intrinsics;
  pair.source_image = pano_to_perspective(pano, window).image;
  pair.source_pose = cam.pose;

  double d_axis;
  if (depth_mode == WalkDepthMode::center_pixel) {
    d_axis = source_depth.at(w / 2, h / 2);
  } else {
    std::vector<float> central;
    for (int y = h * 3 / 8; y < h * 5 / 8; ++y)
      for (int x = w * 3 / 8; x < w * 5 / 8; ++x) central.push_back(source_depth.at(x, y));
    std::sort(central.begin(), central.end());
    d_axis = central[central.size() / 10];
  }

  const double walk = walk_ratio * d_axis;
  const Vec3 forward_world = window_rotation(window) * Vec3(1.0, 0.0, 0.0);
  const Vec3 target_center = cam.pose.center() + walk * forward_world;
  pair.target_pose =
      CameraPose(cam.pose.rotation, -(cam.pose.rotation.rotate(target_center)));

  // Known central region predicted by the rescale factor: the source crop of
  // half-angle (1 - c) * fov / 2 stays at its source scale in the target.
  const double rho_x = std::tan((1.0 - walk_ratio) * window.hfov / 2.0) / std::tan(window.hfov / 2.0);
  const double rho_y = std::tan((1.0 - walk_ratio) * window.vfov / 2.0) / std::tan(window.vfov / 2.0);
  const double half_x = rho_x * w / 2.0;
  const double half_y = rho_y * h / 2.0;

  const ForwardWarpResult warped =
      forward_warp(pair.source_image, source_depth, pair.source_pose, pair.target_pose, intrinsics);
  pair.target_image = warped.image;
  pair.target_inpaint_mask.assign(size_t(w) * h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (std::abs(x + 0.5 - w / 2.0) <= half_x && std::abs(y + 0.5 - h / 2.0) <= half_y) {
        for (int k = 0; k < pano.channels; ++k)
          pair.target_image.at(x, y, k) = pair.source_image.at(x, y, k);
        pair.target_image.set_valid(x, y, true);
        pair.target_inpaint_mask[size_t(y) * w + x] = 0;
      }
    }
  }
  return pair;
}

}  // namespace pvs
