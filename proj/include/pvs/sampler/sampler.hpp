#pragma once

#include "pvs/keyframes/keyframes.hpp"
#include "pvs/sampler/denoiser.hpp"
#include "pvs/sampler/rng.hpp"
#include "pvs/sampler/schedule.hpp"

#include <vector>

namespace pvs {

// ---------------------------------------------------------------------------
// DDPM primitives
// ---------------------------------------------------------------------------

/// One reverse update
///   z_{t-1} = (z_t - (1 - a_t) / sqrt(1 - abar_t) * eps) / sqrt(a_t) + sigma_t u_t.
/// The final step (t == 1) is deterministic; `stochastic` = false silences
/// sigma everywhere. Noise draws come from the counter rng at (stream, t, i).
std::vector<double> ddpm_step(const std::vector<double>& z_t, const std::vector<double>& eps_hat,
                              const NoiseSchedule& schedule, int t, const CounterRng& rng,
                              uint64_t stream = 0, bool stochastic = true);

/// Elementwise mask select: out = m * known + (1 - m) * unknown. The mask has
/// one entry per pixel and broadcasts over `channels`; channels == 1 treats
/// the buffers as flat.
std::vector<double> outpaint_fuse(const std::vector<double>& z_known,
                                  const std::vector<double>& z_unknown,
                                  const std::vector<uint8_t>& mask, int channels = 1);

/// Circular column shift by quarter_turns * (width / 4) columns to the right
/// (the rightmost quarter wraps to the left). Width must be divisible by 4.
/// Four single-quarter applications compose to the identity bit-exactly.
std::vector<double> cycle_shift(const std::vector<double>& latent, int height, int width,
                                int channels, int quarter_turns);

std::vector<uint8_t> cycle_shift_mask(const std::vector<uint8_t>& mask, int height, int width,
                                      int quarter_turns);

// ---------------------------------------------------------------------------
// Spatial weights
// ---------------------------------------------------------------------------

/// Exponential proximity weights of every frame against every anchor:
///   position     w = exp(-|T_i - T_j| / tau_t)
///   orientation  b = exp(-2 * acos(<q_i, q_j>) / tau_q)
///   fused        g = w * b / sum_anchors(w * b)
/// Quaternions are canonicalized before the dot product. Rows of `fused`
/// sum to 1 per frame.
struct SpatialWeights {
  int frames = 0, anchors = 0;
  std::vector<double> position;     // frames x anchors, row-major
  std::vector<double> orientation;  // frames x anchors
  std::vector<double> fused;        // frames x anchors, rows normalized
  double tau_t = 0.0, tau_q = 0.0;

  double at(const std::vector<double>& m, int frame, int anchor) const {
    return m[size_t(frame) * anchors + anchor];
  }
};

SpatialWeights compute_spatial_weights(const std::vector<CameraPose>& frame_poses,
                                       const std::vector<CameraPose>& anchor_poses, double tau_t,
                                       double tau_q);

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

struct SamplerOptions {
  bool stochastic = false;  // sigma == 0 unless enabled
  uint64_t seed = 0;
};

/// Reverse-diffuses a panorama latent while clamping the known footprint each
/// step (forward-noised known path fused per the inpainting rule) and
/// cyclically shifting the latent a quarter turn every cycle_interval steps
/// so every wrap seam is denoised at interior positions. cycle_interval <= 0
/// disables shifting. The result is returned in the input column frame.
std::vector<double> panorama_outpaint_sample(DenoiserInterface& denoiser,
                                             const std::vector<double>& known_latent,
                                             const std::vector<uint8_t>& known_mask, int height,
                                             int width, int channels,
                                             const NoiseSchedule& schedule, int cycle_interval,
                                             const SamplerOptions& options = {},
                                             const DenoiserConditioning& conditioning = {});

/// How the fused per-frame weight enters the noise estimate.
enum class WeightMode {
  literal,  // eps = (z - g * sqrt(abar) * v) / sqrt(1 - abar), g = dominant anchor weight
  blend,    // standard conversion, eps = (z - sqrt(abar) * v) / sqrt(1 - abar)
};

struct SpatialSamplerOptions {
  double tau_t = 4.7;   // meters
  double tau_q = 1.68;  // radians
  WeightMode weight_mode = WeightMode::literal;
  bool stochastic = false;
  uint64_t seed = 0;
  std::vector<double> features_a;  // opaque keyframe conditioning
  std::vector<double> features_b;
};

/// Spatially weighted video sampler over a prepared latent volume. Anchor
/// frames are clamped to their clean latents on known regions every step
/// (zero-mask exclusion); unknown regions, including walk-in peripheries,
/// are denoised. Returns the final volume data.
std::vector<double> spatial_diffusion_sample_volume(LatentVolume volume,
                                                    DenoiserInterface& denoiser,
                                                    const NoiseSchedule& schedule,
                                                    const RaymapVolume* raymaps,
                                                    const std::vector<CameraPose>& frame_poses,
                                                    const std::vector<CameraPose>& anchor_poses,
                                                    const SpatialSamplerOptions& options,
                                                    SpatialWeights* weights_out = nullptr);

/// Keyframe-pair front end: builds the latent volume from the pair (identity
/// encoder, source anchored at frame 0 and target at frame N-1 with its
/// inpaint mask), interpolates nothing itself - frame_poses come from the
/// trajectory module - and decodes the result back to images (identity
/// decoder).
std::vector<PerspectiveImage> spatial_diffusion_sample(const KeyframePair& pair,
                                                       DenoiserInterface& denoiser,
                                                       const NoiseSchedule& schedule,
                                                       const RaymapVolume& raymaps,
                                                       const std::vector<CameraPose>& frame_poses,
                                                       const SpatialSamplerOptions& options);

/// Builds the latent volume for a keyframe pair: N frames at the pair's
/// resolution, anchors at the ends, known masks from the pair.
LatentVolume make_pair_volume(const KeyframePair& pair, int n_frames);

}  // namespace pvs
