#pragma once

#include "pvs/raymap/raymap.hpp"
#include "pvs/sampler/schedule.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace pvs {

/// N-frame diffusion state. Data is frame-major, row-major, channel-minor.
/// The per-frame known mask (one byte per pixel, broadcast over channels)
/// marks regions clamped by outpainting fusion; anchor frames additionally
/// carry the clean latent those regions are clamped to.
struct LatentVolume {
  int frames = 0, height = 0, width = 0, channels = 0;
  std::vector<double> data;
  std::vector<uint8_t> known_mask;  // frames * height * width, true = known
  std::vector<uint8_t> anchor;      // per-frame flag
  std::vector<double> clean;        // clean latents, same layout as data

  static LatentVolume zeros(int frames, int height, int width, int channels) {
    LatentVolume v;
    v.frames = frames;
    v.height = height;
    v.width = width;
    v.channels = channels;
    v.data.assign(size_t(frames) * height * width * channels, 0.0);
    v.known_mask.assign(size_t(frames) * height * width, 0);
    v.anchor.assign(size_t(frames), 0);
    v.clean.assign(v.data.size(), 0.0);
    return v;
  }

  size_t frame_values() const { return size_t(height) * width * channels; }
  size_t frame_pixels() const { return size_t(height) * width; }

  double& at(int f, int y, int x, int c) {
    return data[(size_t(f) * height * width + size_t(y) * width + x) * channels + c];
  }
  double at(int f, int y, int x, int c) const {
    return data[(size_t(f) * height * width + size_t(y) * width + x) * channels + c];
  }

  void validate() const;
};

/// Opaque conditioning passed through to the denoiser: keyframe feature
/// vectors, the raymap volume, and the current cyclic column shift of the
/// latent (panorama sampling rotates the latent; shift-aware denoisers such
/// as the oracles rotate their targets to match).
struct DenoiserConditioning {
  std::vector<double> keyframe_features_a;
  std::vector<double> keyframe_features_b;
  const RaymapVolume* raymaps = nullptr;
  int column_shift = 0;  // latent columns, in [0, width)
};

enum class PredictionKind { clean_volume, noise };

/// Pluggable denoising network. Implementations must return a buffer of the
/// same shape as the input latent and be deterministic for fixed inputs.
class DenoiserInterface {
 public:
  virtual ~DenoiserInterface() = default;

  /// Whether predict() returns the clean volume or the additive noise.
  virtual PredictionKind prediction_kind() const { return PredictionKind::clean_volume; }

  virtual std::vector<double> predict(const LatentVolume& z_t, int t,
                                      const DenoiserConditioning& conditioning) = 0;
};

/// Test oracle: predicts the exact clean target (column-shifted to follow the
/// latent's current cycle phase), which turns the samplers into exact
/// reconstructors.
class OracleCleanDenoiser : public DenoiserInterface {
 public:
  OracleCleanDenoiser(std::vector<double> target, int height, int width, int channels);

  PredictionKind prediction_kind() const override { return PredictionKind::clean_volume; }
  std::vector<double> predict(const LatentVolume& z_t, int t,
                              const DenoiserConditioning& conditioning) override;

 private:
  std::vector<double> target_;
  int height_, width_, channels_;
};

/// Same oracle in the noise parameterization:
/// eps = (z_t - sqrt(alpha_bar_t) * target) / sqrt(1 - alpha_bar_t).
class OracleNoiseDenoiser : public DenoiserInterface {
 public:
  OracleNoiseDenoiser(std::vector<double> target, int height, int width, int channels,
                      NoiseSchedule schedule);

  PredictionKind prediction_kind() const override { return PredictionKind::noise; }
  std::vector<double> predict(const LatentVolume& z_t, int t,
                              const DenoiserConditioning& conditioning) override;

 private:
  std::vector<double> target_;
  int height_, width_, channels_;
  NoiseSchedule schedule_;
};

/// Deterministic stand-in for runs without a real network: hash-seeded
/// low-amplitude pattern around mid-gray. Only exercises plumbing.
class StubDenoiser : public DenoiserInterface {
 public:
  explicit StubDenoiser(uint64_t salt = 0) : salt_(salt) {}
  std::vector<double> predict(const LatentVolume& z_t, int t,
                              const DenoiserConditioning& conditioning) override;

 private:
  uint64_t salt_;
};

/// Client for an out-of-process denoiser. The endpoint is "host:port" (TCP)
/// or a filesystem path (unix socket). Wire format, little-endian:
///   request:  u64 payload length, then "PVSD", u32 t,
///             u32 frames/height/width/channels, f64 latent data
///   response: u64 payload length, then "PVSR",
///             u32 frames/height/width/channels, f64 clean prediction
class ExternalDenoiser : public DenoiserInterface {
 public:
  explicit ExternalDenoiser(const std::string& endpoint);
  ~ExternalDenoiser() override;

  std::vector<double> predict(const LatentVolume& z_t, int t,
                              const DenoiserConditioning& conditioning) override;

 private:
  int fd_ = -1;
};

/// Serves `count` denoise requests on a listening socket with the same wire
/// format; the handler maps (latent, t, dims) to the clean prediction.
/// Returns the bound TCP port (or 0 for unix sockets). Intended for tests and
/// for wrapping in-process models.
class ExternalDenoiserServer {
 public:
  using Handler = std::vector<double> (*)(const std::vector<double>& z, int t, int frames,
                                          int height, int width, int channels, void* user);

  ExternalDenoiserServer(const std::string& endpoint, Handler handler, void* user);
  ~ExternalDenoiserServer();

  int port() const { return port_; }
  /// Blocks until `count` requests were served (one connection can carry many).
  void serve(int count);

 private:
  int listen_fd_ = -1;
  int port_ = 0;
  Handler handler_;
  void* user_;
};

/// Deterministic 128-d stand-in for CLIP-style keyframe features: grid patch
/// statistics hashed from the raster.
std::vector<double> stub_keyframe_features(const std::vector<float>& raster, int width, int height,
                                           int channels);

/// Feature file I/O: magic "FEAT", u32 dim, u32 count, f32 data.
void write_feature_file(const std::string& path, const std::vector<std::vector<double>>& features);
std::vector<std::vector<double>> read_feature_file(const std::string& path);

/// Latent volume container: magic "LVOL", u32 frames/height/width/channels,
/// f64 data frame-major. Used for oracle targets on the CLI.
void write_latent_volume(const std::string& path, const std::vector<double>& data, int frames,
                         int height, int width, int channels);
std::vector<double> read_latent_volume(const std::string& path, int* frames, int* height,
                                       int* width, int* channels);

}  // namespace pvs
