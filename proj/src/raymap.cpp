#include "pvs/raymap/raymap.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace pvs {

Raymap pose_to_raymap(const CameraPose& pose, const CameraIntrinsics& intrinsics, int out_width,
                      int out_height) {
  CameraIntrinsics k = intrinsics;
  if (out_width != intrinsics.width || out_height != intrinsics.height)
    k = intrinsics.scaled_to(out_width, out_height);
  k.validate();

  const Mat3 rot_t = pose.rotation_mat().transpose();
  const Mat3 k_inv = k.inverse_matrix();
  const Mat3 back = rot_t * k_inv;
  const Vec3 camera_center = -(rot_t * pose.translation);

  Raymap raymap(out_width, out_height);
  for (int y = 0; y < out_height; ++y) {
    for (int x = 0; x < out_width; ++x) {
      const Vec3 d = back * Vec3(x + 0.5, y + 0.5, 1.0);
      raymap.set(x, y, camera_center.cross(d), d);
    }
  }
  return raymap;
}

Raymap normalize_raymap(const Raymap& raymap) {
  Raymap out = raymap;
  out.normalized = true;
  const size_t pixels = size_t(raymap.width) * raymap.height;
  for (size_t i = 0; i < pixels; ++i) {
    const size_t j = i * 3;
    const double n = std::sqrt(out.directions[j] * out.directions[j] +
                               out.directions[j + 1] * out.directions[j + 1] +
                               out.directions[j + 2] * out.directions[j + 2]);
    if (n == 0.0) throw std::invalid_argument("normalize_raymap: zero direction");
    for (int c = 0; c < 3; ++c) {
      out.directions[j + c] /= n;
      out.moments[j + c] /= n;
    }
  }
  return out;
}

bool raymap_equivalence_check(const Raymap& a, const Raymap& b, double tol) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("raymap_equivalence_check: dimension mismatch");

  for (int y = 0; y < a.height; ++y) {
    for (int x = 0; x < a.width; ++x) {
      double va[6], vb[6];
      const Vec3 ma = a.moment(x, y), da = a.direction(x, y);
      const Vec3 mb = b.moment(x, y), db = b.direction(x, y);
      va[0] = ma.x(); va[1] = ma.y(); va[2] = ma.z();
      va[3] = da.x(); va[4] = da.y(); va[5] = da.z();
      vb[0] = mb.x(); vb[1] = mb.y(); vb[2] = mb.z();
      vb[3] = db.x(); vb[4] = db.y(); vb[5] = db.z();

      double dot = 0.0, na2 = 0.0, nb2 = 0.0;
      for (int i = 0; i < 6; ++i) {
        dot += va[i] * vb[i];
        na2 += va[i] * va[i];
        nb2 += vb[i] * vb[i];
      }
      if (na2 == 0.0 && nb2 == 0.0) continue;
      if (na2 == 0.0 || nb2 == 0.0) return false;
      const double scale = dot / na2;  // least-squares b = scale * a
      if (!(scale > 0.0)) return false;
      double resid2 = 0.0;
      for (int i = 0; i < 6; ++i) {
        const double r = vb[i] - scale * va[i];
        resid2 += r * r;
      }
      if (std::sqrt(resid2) > tol * std::max(1.0, std::sqrt(nb2))) return false;
    }
  }
  return true;
}

RaymapVolume stack_raymaps(const std::vector<CameraPose>& poses, const CameraIntrinsics& intrinsics,
                           int out_width, int out_height) {
  if (poses.empty()) throw std::invalid_argument("stack_raymaps: empty pose list");

  RaymapVolume volume;
  volume.width = out_width;
  volume.height = out_height;
  volume.frames = int(poses.size());
  volume.data.resize(volume.frame_stride() * poses.size());

  for (size_t f = 0; f < poses.size(); ++f) {
    const Raymap raymap = pose_to_raymap(poses[f], intrinsics, out_width, out_height);
    double* dst = volume.data.data() + volume.frame_stride() * f;
    for (int y = 0; y < out_height; ++y) {
      for (int x = 0; x < out_width; ++x) {
        const size_t i = (size_t(y) * out_width + x) * 3;
        const size_t o = (size_t(y) * out_width + x) * 6;
        std::memcpy(dst + o, raymap.moments.data() + i, 3 * sizeof(double));
        std::memcpy(dst + o + 3, raymap.directions.data() + i, 3 * sizeof(double));
      }
    }
  }
  return volume;
}

Raymap volume_slice(const RaymapVolume& volume, int frame) {
  if (frame < 0 || frame >= volume.frames)
    throw std::invalid_argument("volume_slice: frame index out of range");
  Raymap raymap(volume.width, volume.height);
  const double* src = volume.data.data() + volume.frame_stride() * frame;
  for (int y = 0; y < volume.height; ++y) {
    for (int x = 0; x < volume.width; ++x) {
      const size_t i = (size_t(y) * volume.width + x) * 3;
      const size_t o = (size_t(y) * volume.width + x) * 6;
      std::memcpy(raymap.moments.data() + i, src + o, 3 * sizeof(double));
      std::memcpy(raymap.directions.data() + i, src + o + 3, 3 * sizeof(double));
    }
  }
  return raymap;
}

std::vector<double> direction_quaternion_encoding(const Raymap& raymap) {
  const size_t pixels = size_t(raymap.width) * raymap.height;
  std::vector<double> out(pixels * 4);
  for (size_t i = 0; i < pixels; ++i) {
    out[i * 4] = 0.0;
    out[i * 4 + 1] = raymap.directions[i * 3];
    out[i * 4 + 2] = raymap.directions[i * 3 + 1];
    out[i * 4 + 3] = raymap.directions[i * 3 + 2];
  }
  return out;
}

void write_raymap_volume(const std::string& path, const RaymapVolume& volume,
                         const std::vector<CameraPose>& provenance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");

  out.write("PLKR", 4);
  const uint32_t header[3] = {uint32_t(volume.width), uint32_t(volume.height),
                              uint32_t(volume.frames)};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  std::vector<float> buf(volume.data.size());
  for (size_t i = 0; i < buf.size(); ++i) buf[i] = float(volume.data[i]);
  out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size() * sizeof(float)));
  if (!out) throw std::runtime_error(path + ": short write");

  if (!provenance.empty()) {
    nlohmann::json sidecar;
    sidecar["frames"] = volume.frames;
    nlohmann::json poses = nlohmann::json::array();
    for (const auto& pose : provenance) {
      poses.push_back({{"q", {pose.rotation.w, pose.rotation.x, pose.rotation.y, pose.rotation.z}},
                       {"t", {pose.translation.x(), pose.translation.y(), pose.translation.z()}}});
    }
    sidecar["poses"] = poses;
    std::ofstream side(path + ".json");
    side << sidecar.dump(2) << "\n";
  }
}

RaymapVolume read_raymap_volume(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "PLKR", 4) != 0)
    throw std::runtime_error(path + ": bad raymap magic");
  uint32_t header[3];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in) throw std::runtime_error(path + ": truncated raymap header");

  RaymapVolume volume;
  volume.width = int(header[0]);
  volume.height = int(header[1]);
  volume.frames = int(header[2]);
  const size_t n = volume.frame_stride() * volume.frames;
  std::vector<float> buf(n);
  in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(n * sizeof(float)));
  if (!in) throw std::runtime_error(path + ": truncated raymap data");
  volume.data.assign(buf.begin(), buf.end());
  return volume;
}

}  // namespace pvs
