#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pvs {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into [-pi, pi).
inline double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a - kPi;
}

// ---------------------------------------------------------------------------
// Quaternion
// ---------------------------------------------------------------------------

/// Unit quaternion stored as (w, x, y, z). Rotations act by the sandwich
/// product q * v * conj(q). Canonical form has w >= 0 (first nonzero of
/// x, y, z >= 0 when w == 0) so the double cover maps to one representative.
struct Quat {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  Quat() = default;
  Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

  static Quat identity() { return {1.0, 0.0, 0.0, 0.0}; }

  static Quat from_axis_angle(const Vec3& axis, double angle) {
    const double n = axis.norm();
    if (n == 0.0) throw std::invalid_argument("Quat: zero rotation axis");
    const double h = 0.5 * angle;
    const double s = std::sin(h) / n;
    return {std::cos(h), axis.x() * s, axis.y() * s, axis.z() * s};
  }

  /// Shepperd's method; `r` must be a proper rotation matrix.
  static Quat from_matrix(const Mat3& r);

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

  double dot(const Quat& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }

  Quat conjugate() const { return {w, -x, -y, -z}; }

  Quat negated() const { return {-w, -x, -y, -z}; }

  Quat normalized() const {
    const double n = norm();
    if (n == 0.0) throw std::invalid_argument("Quat: cannot normalize zero quaternion");
    return {w / n, x / n, y / n, z / n};
  }

  /// Double-cover representative: w >= 0; if w == 0 the first nonzero of
  /// (x, y, z) is made >= 0. Idempotent.
  Quat canonical() const {
    if (w > 0.0) return *this;
    if (w < 0.0) return negated();
    if (x != 0.0) return x > 0.0 ? *this : negated();
    if (y != 0.0) return y > 0.0 ? *this : negated();
    if (z != 0.0) return z > 0.0 ? *this : negated();
    return *this;
  }

  bool is_unit(double tol = 1e-9) const { return std::abs(norm() - 1.0) <= tol; }

  /// Hamilton product.
  Quat operator*(const Quat& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z,
            w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x,
            w * o.z + x * o.y - y * o.x + z * o.w};
  }

  /// Rotates a vector by the sandwich product (assumes unit quaternion).
  Vec3 rotate(const Vec3& v) const {
    // v' = v + 2w (u x v) + 2 (u x (u x v)), u = (x,y,z)
    const Vec3 u(x, y, z);
    const Vec3 c = u.cross(v);
    return v + 2.0 * (w * c + u.cross(c));
  }

  /// Rotation angle in radians, in [0, pi].
  double rotation_angle(const Quat& o) const {
    const double d = std::min(1.0, std::abs(dot(o)));
    return 2.0 * std::acos(d);
  }
};

inline bool approx_equal(const Quat& a, const Quat& b, double tol) {
  return std::abs(a.w - b.w) <= tol && std::abs(a.x - b.x) <= tol &&
         std::abs(a.y - b.y) <= tol && std::abs(a.z - b.z) <= tol;
}

/// Quaternion to rotation matrix. Inputs farther than 1e-9 from unit norm are
/// renormalized first; `renormalized` (when non-null) reports that this
/// happened. All matrix entries are bilinear in the components, so q and -q
/// map to bit-identical matrices.
Mat3 rotation_matrix(const Quat& q, bool* renormalized = nullptr);

// ---------------------------------------------------------------------------
// Camera model
// ---------------------------------------------------------------------------

struct CameraIntrinsics {
  double fx = 0.0, fy = 0.0;
  double cx = 0.0, cy = 0.0;
  int width = 0, height = 0;

  void validate() const {
    if (!(fx > 0.0) || !(fy > 0.0))
      throw std::invalid_argument("CameraIntrinsics: focal lengths must be positive");
    if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height))
      throw std::invalid_argument("CameraIntrinsics: principal point outside image");
  }

  Mat3 matrix() const {
    Mat3 k;
    k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
    return k;
  }

  Mat3 inverse_matrix() const {
    Mat3 k;
    k << 1.0 / fx, 0.0, -cx / fx, 0.0, 1.0 / fy, -cy / fy, 0.0, 0.0, 1.0;
    return k;
  }

  /// Same camera re-targeted to another raster size (focal lengths and
  /// principal point scale with the resolution).
  CameraIntrinsics scaled_to(int new_width, int new_height) const {
    const double sx = static_cast<double>(new_width) / width;
    const double sy = static_cast<double>(new_height) / height;
    return {fx * sx, fy * sy, cx * sx, cy * sy, new_width, new_height};
  }
};

/// Rigid camera pose. The stored (rotation, translation) act on world points
/// as x_cam = R * x_world + t, i.e. the extrinsic transform; the camera
/// center in world coordinates is -R^T t. Relative poses between cameras use
/// the same point-map semantics (source coords -> target coords).
struct CameraPose {
  Quat rotation;     // world -> camera
  Vec3 translation = Vec3::Zero();

  CameraPose() = default;
  CameraPose(const Quat& q, const Vec3& t) : rotation(q.normalized().canonical()), translation(t) {}

  Mat3 rotation_mat() const { return rotation_matrix(rotation); }

  Vec3 center() const { return -(rotation.conjugate().rotate(translation)); }

  Vec3 to_camera(const Vec3& p_world) const { return rotation.rotate(p_world) + translation; }

  Vec3 to_world(const Vec3& p_cam) const { return rotation.conjugate().rotate(p_cam - translation); }

  CameraPose inverse() const {
    const Quat qi = rotation.conjugate();
    return CameraPose(qi, -(qi.rotate(translation)));
  }
};

/// Transform taking source-camera coordinates to target-camera coordinates.
inline CameraPose relative_pose(const CameraPose& source, const CameraPose& target) {
  const Quat q_rel = (target.rotation * source.rotation.conjugate()).normalized();
  const Vec3 t_rel = target.translation - q_rel.rotate(source.translation);
  return CameraPose(q_rel, t_rel);
}

// ---------------------------------------------------------------------------
// Rasters
// ---------------------------------------------------------------------------

/// Equirectangular panorama, width = 2 * height, samples in [0, 1].
/// Columns wrap modulo width (longitude periodicity); rows clamp at the
/// poles. Storage is float32 row-major; arithmetic promotes to double.
struct PanoramaImage {
  int width = 0, height = 0, channels = 0;
  std::vector<float> data;

  PanoramaImage() = default;
  PanoramaImage(int w, int h, int c) : width(w), height(h), channels(c), data(size_t(w) * h * c, 0.0f) {}

  size_t index(int x, int y, int c) const { return (size_t(y) * width + x) * channels + c; }

  float& at(int x, int y, int c) { return data[index(x, y, c)]; }
  float at(int x, int y, int c) const { return data[index(x, y, c)]; }

  int wrap_col(int x) const {
    x %= width;
    return x < 0 ? x + width : x;
  }

  int clamp_row(int y) const { return y < 0 ? 0 : (y >= height ? height - 1 : y); }

  float at_wrapped(int x, int y, int c) const { return at(wrap_col(x), clamp_row(y), c); }

  /// Bilinear sample at continuous index coordinates (pixel i holds the value
  /// of continuous coordinate i + 0.5). Columns wrap, rows clamp.
  double sample_bilinear(double x, double y, int c) const;
};

/// Pinhole perspective image; pixels outside the projection footprint carry
/// value 0 with valid = false.
struct PerspectiveImage {
  int width = 0, height = 0, channels = 0;
  std::vector<float> data;
  std::vector<uint8_t> valid;  // per pixel

  PerspectiveImage() = default;
  PerspectiveImage(int w, int h, int c)
      : width(w), height(h), channels(c), data(size_t(w) * h * c, 0.0f), valid(size_t(w) * h, 1) {}

  size_t index(int x, int y, int c) const { return (size_t(y) * width + x) * channels + c; }

  float& at(int x, int y, int c) { return data[index(x, y, c)]; }
  float at(int x, int y, int c) const { return data[index(x, y, c)]; }

  bool is_valid(int x, int y) const { return valid[size_t(y) * width + x] != 0; }
  void set_valid(int x, int y, bool v) { valid[size_t(y) * width + x] = v ? 1 : 0; }

  /// Bilinear sample with clamped borders; returns false if any contributing
  /// pixel is invalid.
  bool sample_bilinear(double x, double y, double* out) const;
};

struct DepthMap {
  int width = 0, height = 0;
  std::vector<float> data;
  double max_depth = 0.0;  // d_Max

  DepthMap() = default;
  DepthMap(int w, int h, double dmax) : width(w), height(h), data(size_t(w) * h, 0.0f), max_depth(dmax) {}

  float& at(int x, int y) { return data[size_t(y) * width + x]; }
  float at(int x, int y) const { return data[size_t(y) * width + x]; }

  void validate() const {
    for (float d : data)
      if (!std::isfinite(d) || d <= 0.0f || double(d) > max_depth)
        throw std::invalid_argument("DepthMap: depths must be finite, > 0 and <= max_depth");
  }
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Lists every violated panorama invariant; empty report iff valid.
ValidationReport validate_panorama(const PanoramaImage& image);

}  // namespace pvs
