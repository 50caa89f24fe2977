#include "pvs/metrics/metrics.hpp"

#include "pvs/sampler/rng.hpp"

#include <Eigen/Eigenvalues>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace pvs {

double psnr(const std::vector<float>& a, const std::vector<float>& b, double peak) {
  if (a.size() != b.size()) throw std::invalid_argument("psnr: shape mismatch");
  if (a.empty()) throw std::invalid_argument("psnr: empty input");
  double mse = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = double(a[i]) - double(b[i]);
    mse += d * d;
  }
  mse /= double(a.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double psnr(const PerspectiveImage& a, const PerspectiveImage& b, double peak) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels)
    throw std::invalid_argument("psnr: shape mismatch");
  return psnr(a.data, b.data, peak);
}

namespace {

std::vector<double> gaussian_window(int radius, double sigma) {
  const int n = 2 * radius + 1;
  std::vector<double> w(size_t(n) * n);
  double sum = 0.0;
  for (int y = -radius; y <= radius; ++y)
    for (int x = -radius; x <= radius; ++x) {
      const double v = std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
      w[size_t(y + radius) * n + (x + radius)] = v;
      sum += v;
    }
  for (double& v : w) v /= sum;
  return w;
}

}  // namespace

double ssim(const std::vector<float>& a, const std::vector<float>& b, int width, int height,
            int channels) {
  if (a.size() != b.size() || a.size() != size_t(width) * height * channels)
    throw std::invalid_argument("ssim: shape mismatch");
  constexpr int kRadius = 5;  // 11x11 window
  if (width < 2 * kRadius + 1 || height < 2 * kRadius + 1)
    throw std::invalid_argument("ssim: image smaller than the 11x11 window");

  static const std::vector<double> window = gaussian_window(kRadius, 1.5);
  constexpr double kL = 1.0;
  constexpr double kC1 = (0.01 * kL) * (0.01 * kL);
  constexpr double kC2 = (0.03 * kL) * (0.03 * kL);

  double total = 0.0;
  size_t count = 0;
  for (int c = 0; c < channels; ++c) {
    for (int y = kRadius; y < height - kRadius; ++y) {
      for (int x = kRadius; x < width - kRadius; ++x) {
        double mu_a = 0.0, mu_b = 0.0;
        for (int dy = -kRadius; dy <= kRadius; ++dy)
          for (int dx = -kRadius; dx <= kRadius; ++dx) {
            const double w = window[size_t(dy + kRadius) * (2 * kRadius + 1) + (dx + kRadius)];
            mu_a += w * a[(size_t(y + dy) * width + (x + dx)) * channels + c];
            mu_b += w * b[(size_t(y + dy) * width + (x + dx)) * channels + c];
          }
        double var_a = 0.0, var_b = 0.0, cov = 0.0;
        for (int dy = -kRadius; dy <= kRadius; ++dy)
          for (int dx = -kRadius; dx <= kRadius; ++dx) {
            const double w = window[size_t(dy + kRadius) * (2 * kRadius + 1) + (dx + kRadius)];
            const double da = a[(size_t(y + dy) * width + (x + dx)) * channels + c] - mu_a;
            const double db = b[(size_t(y + dy) * width + (x + dx)) * channels + c] - mu_b;
            var_a += w * da * da;
            var_b += w * db * db;
            cov += w * da * db;
          }
        const double num = (2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2);
        const double den = (mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2);
        total += num / den;
        ++count;
      }
    }
  }
  return total / double(count);
}

double ssim(const PerspectiveImage& a, const PerspectiveImage& b) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels)
    throw std::invalid_argument("ssim: shape mismatch");
  return ssim(a.data, b.data, a.width, a.height, a.channels);
}

Mat3 fundamental_matrix(const CameraPose& pose_rel, const CameraIntrinsics& k_a,
                        const CameraIntrinsics& k_b) {
  const Vec3 t = pose_rel.translation;
  if (t.norm() < 1e-12)
    throw std::invalid_argument("fundamental_matrix: zero translation, essential degenerate");
  Mat3 t_cross;
  t_cross << 0.0, -t.z(), t.y(), t.z(), 0.0, -t.x(), -t.y(), t.x(), 0.0;
  return k_b.inverse_matrix().transpose() * t_cross * pose_rel.rotation_mat() *
         k_a.inverse_matrix();
}

namespace {

double point_line_distance(double x, double y, const Vec3& line) {
  const double n = std::sqrt(line.x() * line.x() + line.y() * line.y());
  if (n == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(line.x() * x + line.y() * y + line.z()) / n;
}

}  // namespace

std::vector<double> symmetric_epipolar_distance(const Correspondences& matches,
                                                const CameraPose& pose_rel,
                                                const CameraIntrinsics& k_a,
                                                const CameraIntrinsics& k_b) {
  const Mat3 f = fundamental_matrix(pose_rel, k_a, k_b);
  const Mat3 ft = f.transpose();
  std::vector<double> distances;
  distances.reserve(matches.size());
  for (size_t i = 0; i < matches.size(); ++i) {
    const Vec3 xa(matches.source[i * 2], matches.source[i * 2 + 1], 1.0);
    const Vec3 xb(matches.target[i * 2], matches.target[i * 2 + 1], 1.0);
    const double d_target = point_line_distance(xb.x(), xb.y(), f * xa);
    const double d_source = point_line_distance(xa.x(), xa.y(), ft * xb);
    distances.push_back(d_target + d_source);
  }
  return distances;
}

bool mtsed_pair(const Correspondences& matches, const CameraPose& pose_rel,
                const CameraIntrinsics& k_a, const CameraIntrinsics& k_b, double t_error,
                int t_match) {
  if (int(matches.size()) <= t_match) return false;
  std::vector<double> distances = symmetric_epipolar_distance(matches, pose_rel, k_a, k_b);
  std::nth_element(distances.begin(), distances.begin() + distances.size() / 2, distances.end());
  const double median = distances[distances.size() / 2];
  return median < t_error;
}

double mtsed_sequence(const std::vector<Correspondences>& consecutive_matches,
                      const std::vector<CameraPose>& relative_poses, const CameraIntrinsics& k,
                      double t_error, int t_match) {
  if (consecutive_matches.size() != relative_poses.size())
    throw std::invalid_argument("mtsed_sequence: pair count mismatch");
  if (consecutive_matches.empty()) return 0.0;
  size_t passing = 0;
  for (size_t i = 0; i < consecutive_matches.size(); ++i)
    passing += mtsed_pair(consecutive_matches[i], relative_poses[i], k, k, t_error, t_match);
  return double(passing) / double(consecutive_matches.size());
}

Correspondences synthetic_correspondences(const CameraPose& pose_a, const CameraPose& pose_b,
                                          const CameraIntrinsics& k, int count, uint64_t seed,
                                          double depth_min, double depth_max) {
  const CounterRng rng{seed};
  const Mat3 k_inv = k.inverse_matrix();
  Correspondences matches;
  uint64_t draw = 0;
  int produced = 0;
  while (produced < count && draw < uint64_t(count) * 1000) {
    // Sample inside camera a's frustum, then keep points camera b also sees.
    const double u = rng.uniform(1, 0, draw * 3) * k.width;
    const double v = rng.uniform(1, 0, draw * 3 + 1) * k.height;
    const double z = depth_min + rng.uniform(1, 0, draw * 3 + 2) * (depth_max - depth_min);
    ++draw;
    const Vec3 p_world = pose_a.to_world(z * (k_inv * Vec3(u, v, 1.0)));
    const Vec3 p_b = pose_b.to_camera(p_world);
    if (p_b.z() <= 1e-6) continue;
    const double ub = k.fx * p_b.x() / p_b.z() + k.cx;
    const double vb = k.fy * p_b.y() / p_b.z() + k.cy;
    if (ub < 0.0 || ub >= k.width || vb < 0.0 || vb >= k.height) continue;
    matches.add(u, v, ub, vb);
    ++produced;
  }
  return matches;
}

FeatureDistribution feature_distribution(const std::vector<std::vector<double>>& features) {
  if (features.size() < 2) throw std::invalid_argument("feature_distribution: need N >= 2");
  const int d = int(features.front().size());
  for (const auto& f : features)
    if (int(f.size()) != d) throw std::invalid_argument("feature_distribution: ragged features");

  FeatureDistribution dist;
  dist.count = int(features.size());
  dist.mean = Eigen::VectorXd::Zero(d);
  for (const auto& f : features)
    dist.mean += Eigen::Map<const Eigen::VectorXd>(f.data(), d);
  dist.mean /= double(features.size());

  dist.covariance = Eigen::MatrixXd::Zero(d, d);
  for (const auto& f : features) {
    const Eigen::VectorXd centered = Eigen::Map<const Eigen::VectorXd>(f.data(), d) - dist.mean;
    dist.covariance += centered * centered.transpose();
  }
  dist.covariance /= double(features.size() - 1);
  return dist;
}

namespace {

Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (m + m.transpose()));
  if (solver.info() != Eigen::Success) throw std::runtime_error("sqrt_psd: eigensolver failed");
  Eigen::VectorXd values = solver.eigenvalues();
  for (int i = 0; i < values.size(); ++i) values[i] = std::sqrt(std::max(0.0, values[i]));
  return solver.eigenvectors() * values.asDiagonal() * solver.eigenvectors().transpose();
}

double trace_sqrt_product(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
  const Eigen::MatrixXd root_p = sqrt_psd(p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      0.5 * (root_p * q * root_p + (root_p * q * root_p).transpose()));
  if (solver.info() != Eigen::Success) throw std::runtime_error("trace_sqrt_product: failed");
  double trace = 0.0;
  for (int i = 0; i < solver.eigenvalues().size(); ++i)
    trace += std::sqrt(std::max(0.0, solver.eigenvalues()[i]));
  return trace;
}

}  // namespace

double frechet_distance(const FeatureDistribution& p, const FeatureDistribution& q) {
  if (p.mean.size() != q.mean.size())
    throw std::invalid_argument("frechet_distance: dimension mismatch");

  const double mean_term = (p.mean - q.mean).squaredNorm();
  double trace_term;
  try {
    trace_term = p.covariance.trace() + q.covariance.trace() -
                 2.0 * trace_sqrt_product(p.covariance, q.covariance);
  } catch (const std::runtime_error&) {
    const int d = int(p.mean.size());
    const Eigen::MatrixXd jitter = 1e-8 * Eigen::MatrixXd::Identity(d, d);
    trace_term = (p.covariance + jitter).trace() + (q.covariance + jitter).trace() -
                 2.0 * trace_sqrt_product(p.covariance + jitter, q.covariance + jitter);
  }
  double result = mean_term + trace_term;
  if (result < 0.0 && result > -1e-6) result = 0.0;
  return result;
}

std::vector<double> video_feature_stack(const std::vector<std::vector<double>>& frame_features) {
  if (frame_features.empty()) throw std::invalid_argument("video_feature_stack: empty sequence");
  const size_t d = frame_features.front().size();
  for (const auto& f : frame_features)
    if (f.size() != d) throw std::invalid_argument("video_feature_stack: ragged features");

  std::vector<double> out(2 * d, 0.0);
  for (const auto& f : frame_features)
    for (size_t i = 0; i < d; ++i) out[i] += f[i];
  for (size_t i = 0; i < d; ++i) out[i] /= double(frame_features.size());

  if (frame_features.size() > 1) {
    const size_t pairs = frame_features.size() - 1;
    for (size_t t = 0; t + 1 < frame_features.size(); ++t)
      for (size_t i = 0; i < d; ++i)
        out[d + i] += frame_features[t + 1][i] - frame_features[t][i];
    for (size_t i = 0; i < d; ++i) out[d + i] /= double(pairs);
  }

  // Normalize, then scale back by the recorded norm.
  double norm = 0.0;
  for (double v : out) norm += v * v;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& v : out) v /= norm;
    for (double& v : out) v *= norm;
  }
  return out;
}

CorrespondenceFile read_correspondence_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  const nlohmann::json j = nlohmann::json::parse(in);

  CorrespondenceFile file;
  const auto& k = j.at("intrinsics");
  file.intrinsics = {k.at("fx"), k.at("fy"), k.at("cx"), k.at("cy"), k.at("w"), k.at("h")};
  for (const auto& pair : j.at("pairs")) {
    const auto& q = pair.at("q");
    const auto& t = pair.at("t");
    file.relative_poses.emplace_back(Quat(q.at(0), q.at(1), q.at(2), q.at(3)),
                                     Vec3(t.at(0), t.at(1), t.at(2)));
    Correspondences matches;
    for (const auto& m : pair.at("matches")) matches.add(m.at(0), m.at(1), m.at(2), m.at(3));
    file.pairs.push_back(std::move(matches));
  }
  return file;
}

void write_correspondence_file(const std::string& path, const CorrespondenceFile& file) {
  nlohmann::json pairs = nlohmann::json::array();
  for (size_t i = 0; i < file.pairs.size(); ++i) {
    const auto& pose = file.relative_poses[i];
    nlohmann::json matches = nlohmann::json::array();
    for (size_t m = 0; m < file.pairs[i].size(); ++m)
      matches.push_back({file.pairs[i].source[m * 2], file.pairs[i].source[m * 2 + 1],
                         file.pairs[i].target[m * 2], file.pairs[i].target[m * 2 + 1]});
    pairs.push_back({{"q", {pose.rotation.w, pose.rotation.x, pose.rotation.y, pose.rotation.z}},
                     {"t", {pose.translation.x(), pose.translation.y(), pose.translation.z()}},
                     {"matches", matches}});
  }
  const auto& k = file.intrinsics;
  const nlohmann::json j{{"intrinsics",
                          {{"fx", k.fx},
                           {"fy", k.fy},
                           {"cx", k.cx},
                           {"cy", k.cy},
                           {"w", k.width},
                           {"h", k.height}}},
                         {"pairs", pairs}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << j.dump(2) << "\n";
}

std::vector<double> synthetic_frame_features(const PerspectiveImage& frame) {
  // 8x8 grid of luma mean/variance, d = 128.
  const int grid = 8;
  std::vector<double> features(grid * grid * 2, 0.0);
  for (int gy = 0; gy < grid; ++gy) {
    for (int gx = 0; gx < grid; ++gx) {
      const int x0 = frame.width * gx / grid;
      const int x1 = std::max(x0 + 1, frame.width * (gx + 1) / grid);
      const int y0 = frame.height * gy / grid;
      const int y1 = std::max(y0 + 1, frame.height * (gy + 1) / grid);
      double sum = 0.0, sum2 = 0.0;
      int n = 0;
      for (int y = y0; y < y1 && y < frame.height; ++y)
        for (int x = x0; x < x1 && x < frame.width; ++x) {
          double luma = 0.0;
          for (int c = 0; c < frame.channels; ++c) luma += frame.at(x, y, c);
          luma /= frame.channels;
          sum += luma;
          sum2 += luma * luma;
          ++n;
        }
      const double mean = n > 0 ? sum / n : 0.0;
      features[(gy * grid + gx) * 2] = mean;
      features[(gy * grid + gx) * 2 + 1] = n > 0 ? std::max(0.0, sum2 / n - mean * mean) : 0.0;
    }
  }
  return features;
}

}  // namespace pvs
