#include "pvs/core/types.hpp"

#include <cmath>
#include <sstream>

namespace pvs {

Mat3 rotation_matrix(const Quat& q_in, bool* renormalized) {
  Quat q = q_in;
  const bool off_unit = !q.is_unit(1e-9);
  if (off_unit) q = q.normalized();
  if (renormalized) *renormalized = off_unit;

  const double w = q.w, x = q.x, y = q.y, z = q.z;
  Mat3 r;
  r << 1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y),
      2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x),
      2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y);
  return r;
}

Quat Quat::from_matrix(const Mat3& r) {
  const double trace = r.trace();
  Quat q;
  if (trace > 0.0) {
    const double s = std::sqrt(trace + 1.0) * 2.0;
    q = {0.25 * s, (r(2, 1) - r(1, 2)) / s, (r(0, 2) - r(2, 0)) / s, (r(1, 0) - r(0, 1)) / s};
  } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
    const double s = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2)) * 2.0;
    q = {(r(2, 1) - r(1, 2)) / s, 0.25 * s, (r(0, 1) + r(1, 0)) / s, (r(0, 2) + r(2, 0)) / s};
  } else if (r(1, 1) > r(2, 2)) {
    const double s = std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2)) * 2.0;
    q = {(r(0, 2) - r(2, 0)) / s, (r(0, 1) + r(1, 0)) / s, 0.25 * s, (r(1, 2) + r(2, 1)) / s};
  } else {
    const double s = std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1)) * 2.0;
    q = {(r(1, 0) - r(0, 1)) / s, (r(0, 2) + r(2, 0)) / s, (r(1, 2) + r(2, 1)) / s, 0.25 * s};
  }
  return q.normalized().canonical();
}

double PanoramaImage::sample_bilinear(double x, double y, int c) const {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0;
  const double fy = y - y0;
  const double v00 = at_wrapped(x0, y0, c);
  const double v10 = at_wrapped(x0 + 1, y0, c);
  const double v01 = at_wrapped(x0, y0 + 1, c);
  const double v11 = at_wrapped(x0 + 1, y0 + 1, c);
  return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11);
}

bool PerspectiveImage::sample_bilinear(double x, double y, double* out) const {
  auto clampi = [](int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); };
  const int x0 = clampi(static_cast<int>(std::floor(x)), 0, width - 1);
  const int y0 = clampi(static_cast<int>(std::floor(y)), 0, height - 1);
  const int x1 = clampi(x0 + 1, 0, width - 1);
  const int y1 = clampi(y0 + 1, 0, height - 1);
  const double fx = std::min(1.0, std::max(0.0, x - x0));
  const double fy = std::min(1.0, std::max(0.0, y - y0));

  if (!is_valid(x0, y0) || !is_valid(x1, y0) || !is_valid(x0, y1) || !is_valid(x1, y1)) return false;

  for (int c = 0; c < channels; ++c) {
    const double v00 = at(x0, y0, c);
    const double v10 = at(x1, y0, c);
    const double v01 = at(x0, y1, c);
    const double v11 = at(x1, y1, c);
    out[c] = (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11);
  }
  return true;
}

ValidationReport validate_panorama(const PanoramaImage& image) {
  ValidationReport report;
  if (image.width != 2 * image.height) {
    std::ostringstream os;
    os << "aspect: width (" << image.width << ") != 2 * height (" << image.height << ")";
    report.violations.push_back(os.str());
  }
  if (image.channels <= 0) report.violations.push_back("channels: must be positive");
  if (image.data.size() != size_t(image.width) * image.height * std::max(image.channels, 0))
    report.violations.push_back("data: size does not match width * height * channels");

  bool nonfinite = false, out_of_range = false;
  for (float v : image.data) {
    if (!std::isfinite(v)) nonfinite = true;
    else if (v < 0.0f || v > 1.0f) out_of_range = true;
  }
  if (nonfinite) report.violations.push_back("finiteness: raster contains non-finite samples");
  if (out_of_range) report.violations.push_back("range: raster samples outside [0, 1]");
  return report;
}

}  // namespace pvs
