#pragma once

#include "pvs/core/types.hpp"

#include <string>
#include <vector>

namespace pvs {

// ---------------------------------------------------------------------------
// Image metrics
// ---------------------------------------------------------------------------

/// Peak signal-to-noise ratio in dB; identical images return +infinity.
double psnr(const std::vector<float>& a, const std::vector<float>& b, double peak = 1.0);
double psnr(const PerspectiveImage& a, const PerspectiveImage& b, double peak = 1.0);

/// Windowed SSIM, 11x11 Gaussian window sigma = 1.5, C1 = (0.01 L)^2,
/// C2 = (0.03 L)^2, L = 1. Multi-channel images average the per-channel
/// scores. The map is evaluated where the window fits entirely inside the
/// image; smaller images are an error.
double ssim(const std::vector<float>& a, const std::vector<float>& b, int width, int height,
            int channels);
double ssim(const PerspectiveImage& a, const PerspectiveImage& b);

// ---------------------------------------------------------------------------
// Two-view geometry
// ---------------------------------------------------------------------------

struct Correspondences {
  // matched continuous pixel positions, one entry per match
  std::vector<double> source;  // 2 per match
  std::vector<double> target;  // 2 per match

  size_t size() const { return source.size() / 2; }
  void add(double xs, double ys, double xt, double yt) {
    source.push_back(xs);
    source.push_back(ys);
    target.push_back(xt);
    target.push_back(yt);
  }
};

/// Fundamental matrix K_b^-T [t]x R K_a^-1 of a relative pose (source to
/// target point map). Degenerate for zero translation.
Mat3 fundamental_matrix(const CameraPose& pose_rel, const CameraIntrinsics& k_a,
                        const CameraIntrinsics& k_b);

/// Symmetric epipolar distance per match: point-to-epiline distance in the
/// target plus the transposed distance in the source, in pixels.
std::vector<double> symmetric_epipolar_distance(const Correspondences& matches,
                                                const CameraPose& pose_rel,
                                                const CameraIntrinsics& k_a,
                                                const CameraIntrinsics& k_b);

/// Median-threshold symmetric epipolar gate: true iff the median distance is
/// below t_error and the match count exceeds t_match.
bool mtsed_pair(const Correspondences& matches, const CameraPose& pose_rel,
                const CameraIntrinsics& k_a, const CameraIntrinsics& k_b, double t_error = 2.5,
                int t_match = 10);

/// Fraction of consecutive-frame pairs passing the mTSED gate.
double mtsed_sequence(const std::vector<Correspondences>& consecutive_matches,
                      const std::vector<CameraPose>& relative_poses, const CameraIntrinsics& k,
                      double t_error = 2.5, int t_match = 10);

/// Exact synthetic correspondences: random scene points in front of both
/// cameras, projected with the given intrinsics. Deterministic per seed.
Correspondences synthetic_correspondences(const CameraPose& pose_a, const CameraPose& pose_b,
                                          const CameraIntrinsics& k, int count, uint64_t seed,
                                          double depth_min = 2.0, double depth_max = 8.0);

// ---------------------------------------------------------------------------
// Distribution metrics
// ---------------------------------------------------------------------------

struct FeatureDistribution {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // unbiased, 1/(N-1)
  int count = 0;
};

FeatureDistribution feature_distribution(const std::vector<std::vector<double>>& features);

/// Frechet distance |mu_p - mu_q|^2 + Tr(S_p + S_q - 2 sqrt(S_p S_q)); the
/// matrix square root uses the symmetrized product sqrt(A) S_q sqrt(A) with
/// eigenvalues clamped at zero, retried once with 1e-8 jitter.
double frechet_distance(const FeatureDistribution& p, const FeatureDistribution& q);

/// Per-sequence temporal aggregation: mean-pooled frame features concatenated
/// with the mean of adjacent frame differences, unit-normalized and rescaled
/// back by the recorded norm.
std::vector<double> video_feature_stack(const std::vector<std::vector<double>>& frame_features);

/// Deterministic 128-d synthetic video-frame features (grid patch statistics)
/// standing in for a learned extractor.
std::vector<double> synthetic_frame_features(const PerspectiveImage& frame);

/// Correspondence files: JSON with per-pair matches and relative poses,
/// {"intrinsics": {...}, "pairs": [{"q": [...], "t": [...],
///  "matches": [[xa, ya, xb, yb], ...]}]}.
struct CorrespondenceFile {
  CameraIntrinsics intrinsics;
  std::vector<Correspondences> pairs;
  std::vector<CameraPose> relative_poses;
};
CorrespondenceFile read_correspondence_file(const std::string& path);
void write_correspondence_file(const std::string& path, const CorrespondenceFile& file);

}  // namespace pvs
