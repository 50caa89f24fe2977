#include "pvs/sampler/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pvs {

std::vector<double> ddpm_step(const std::vector<double>& z_t, const std::vector<double>& eps_hat,
                              const NoiseSchedule& schedule, int t, const CounterRng& rng,
                              uint64_t stream, bool stochastic) {
  if (t < 1 || t > schedule.steps) throw std::invalid_argument("ddpm_step: step out of range");
  if (z_t.size() != eps_hat.size()) throw std::invalid_argument("ddpm_step: shape mismatch");

  const double alpha = schedule.alpha_at(t);
  const double abar = schedule.alpha_bar_at(t);
  const double inv_root_alpha = 1.0 / std::sqrt(alpha);
  const double eps_coeff = (1.0 - alpha) / std::sqrt(1.0 - abar);
  const double sigma = (t == 1 || !stochastic) ? 0.0 : schedule.sigma_at(t);

  std::vector<double> out(z_t.size());
  for (size_t i = 0; i < out.size(); ++i) {
    double v = inv_root_alpha * (z_t[i] - eps_coeff * eps_hat[i]);
    if (sigma > 0.0) v += sigma * rng.normal(stream, uint64_t(t), i);
    out[i] = v;
  }
  return out;
}

std::vector<double> outpaint_fuse(const std::vector<double>& z_known,
                                  const std::vector<double>& z_unknown,
                                  const std::vector<uint8_t>& mask, int channels) {
  if (z_known.size() != z_unknown.size()) throw std::invalid_argument("outpaint_fuse: shape mismatch");
  if (mask.size() * size_t(channels) != z_known.size())
    throw std::invalid_argument("outpaint_fuse: mask does not match latent shape");

  std::vector<double> out(z_known.size());
  for (size_t p = 0; p < mask.size(); ++p) {
    const size_t base = p * channels;
    if (mask[p])
      for (int c = 0; c < channels; ++c) out[base + c] = z_known[base + c];
    else
      for (int c = 0; c < channels; ++c) out[base + c] = z_unknown[base + c];
  }
  return out;
}

std::vector<double> cycle_shift(const std::vector<double>& latent, int height, int width,
                                int channels, int quarter_turns) {
  if (width % 4 != 0) throw std::invalid_argument("cycle_shift: width not divisible by 4");
  if (latent.size() % (size_t(height) * width * channels) != 0)
    throw std::invalid_argument("cycle_shift: latent size does not match dimensions");

  const int shift = ((quarter_turns % 4) + 4) % 4 * (width / 4);
  if (shift == 0) return latent;

  const size_t frame_values = size_t(height) * width * channels;
  const size_t frames = latent.size() / frame_values;
  std::vector<double> out(latent.size());
  for (size_t f = 0; f < frames; ++f)
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const int nx = (x + shift) % width;
        const size_t src = f * frame_values + (size_t(y) * width + x) * channels;
        const size_t dst = f * frame_values + (size_t(y) * width + nx) * channels;
        for (int c = 0; c < channels; ++c) out[dst + c] = latent[src + c];
      }
  return out;
}

std::vector<uint8_t> cycle_shift_mask(const std::vector<uint8_t>& mask, int height, int width,
                                      int quarter_turns) {
  if (width % 4 != 0) throw std::invalid_argument("cycle_shift_mask: width not divisible by 4");
  const int shift = ((quarter_turns % 4) + 4) % 4 * (width / 4);
  if (shift == 0) return mask;
  std::vector<uint8_t> out(mask.size());
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      out[size_t(y) * width + (x + shift) % width] = mask[size_t(y) * width + x];
  return out;
}

SpatialWeights compute_spatial_weights(const std::vector<CameraPose>& frame_poses,
                                       const std::vector<CameraPose>& anchor_poses, double tau_t,
                                       double tau_q) {
  if (!(tau_t > 0.0) || !(tau_q > 0.0))
    throw std::invalid_argument("compute_spatial_weights: temperatures must be positive");
  if (anchor_poses.empty()) throw std::invalid_argument("compute_spatial_weights: no anchors");

  SpatialWeights weights;
  weights.frames = int(frame_poses.size());
  weights.anchors = int(anchor_poses.size());
  weights.tau_t = tau_t;
  weights.tau_q = tau_q;
  weights.position.resize(size_t(weights.frames) * weights.anchors);
  weights.orientation.resize(weights.position.size());
  weights.fused.resize(weights.position.size());

  for (int j = 0; j < weights.frames; ++j) {
    double total = 0.0;
    for (int i = 0; i < weights.anchors; ++i) {
      const size_t k = size_t(j) * weights.anchors + i;
      const double dist = (frame_poses[j].translation - anchor_poses[i].translation).norm();
      const double dot = std::clamp(
          frame_poses[j].rotation.canonical().dot(anchor_poses[i].rotation.canonical()), -1.0, 1.0);
      weights.position[k] = std::exp(-dist / tau_t);
      weights.orientation[k] = std::exp(-2.0 * std::acos(dot) / tau_q);
      weights.fused[k] = weights.position[k] * weights.orientation[k];
      total += weights.fused[k];
    }
    if (total < 1e-300) total = 1e-300;
    for (int i = 0; i < weights.anchors; ++i) weights.fused[size_t(j) * weights.anchors + i] /= total;
  }
  return weights;
}

namespace {

/// Clean prediction from a denoiser call, converting the noise
/// parameterization via v = (z - sqrt(1 - abar) * eps) / sqrt(abar).
std::vector<double> predict_clean(DenoiserInterface& denoiser, const LatentVolume& z, int t,
                                  const NoiseSchedule& schedule,
                                  const DenoiserConditioning& conditioning) {
  std::vector<double> pred = denoiser.predict(z, t, conditioning);
  if (pred.size() != z.data.size())
    throw std::runtime_error("denoiser returned a volume of the wrong shape");
  if (denoiser.prediction_kind() == PredictionKind::noise) {
    const double abar = schedule.alpha_bar_at(t);
    const double root_abar = std::sqrt(abar);
    const double root_one_minus = std::sqrt(1.0 - abar);
    for (size_t i = 0; i < pred.size(); ++i)
      pred[i] = (z.data[i] - root_one_minus * pred[i]) / root_abar;
  }
  return pred;
}

}  // namespace

std::vector<double> panorama_outpaint_sample(DenoiserInterface& denoiser,
                                             const std::vector<double>& known_latent,
                                             const std::vector<uint8_t>& known_mask, int height,
                                             int width, int channels, const NoiseSchedule& schedule,
                                             int cycle_interval, const SamplerOptions& options,
                                             const DenoiserConditioning& conditioning) {
  schedule.validate();
  if (known_latent.size() != size_t(height) * width * channels)
    throw std::invalid_argument("panorama_outpaint_sample: latent size mismatch");
  if (known_mask.size() != size_t(height) * width)
    throw std::invalid_argument("panorama_outpaint_sample: mask size mismatch");
  if (cycle_interval > 0 && width % 4 != 0)
    throw std::invalid_argument("panorama_outpaint_sample: width not divisible by 4");

  const CounterRng rng{options.seed};
  LatentVolume state = LatentVolume::zeros(1, height, width, channels);
  for (size_t i = 0; i < state.data.size(); ++i)
    state.data[i] = rng.normal(0, 0, i);  // z_T ~ N(0, I)

  std::vector<double> known = known_latent;
  std::vector<uint8_t> mask = known_mask;
  DenoiserConditioning cond = conditioning;

  int phase = 0;
  int steps_since_shift = 0;
  for (int t = schedule.steps; t >= 1; --t) {
    if (cycle_interval > 0 && steps_since_shift == cycle_interval) {
      state.data = cycle_shift(state.data, height, width, channels, 1);
      known = cycle_shift(known, height, width, channels, 1);
      mask = cycle_shift_mask(mask, height, width, 1);
      phase = (phase + 1) % 4;
      steps_since_shift = 0;
    }
    cond.column_shift = phase * (width / 4);

    const std::vector<double> v_hat = predict_clean(denoiser, state, t, schedule, cond);
    const double abar = schedule.alpha_bar_at(t);
    const double root_abar = std::sqrt(abar);
    const double inv_root_one_minus = 1.0 / std::sqrt(1.0 - abar);
    std::vector<double> eps(state.data.size());
    for (size_t i = 0; i < eps.size(); ++i)
      eps[i] = (state.data[i] - root_abar * v_hat[i]) * inv_root_one_minus;

    state.data = ddpm_step(state.data, eps, schedule, t, rng, 1, options.stochastic);

    // Known path: forward-noise the ground truth to level t-1 and fuse.
    const double abar_prev = schedule.alpha_bar_at(t - 1);
    const double root_prev = std::sqrt(abar_prev);
    const double noise_prev = std::sqrt(std::max(0.0, 1.0 - abar_prev));
    std::vector<double> known_t(known.size());
    for (size_t i = 0; i < known.size(); ++i) {
      known_t[i] = root_prev * known[i];
      if (options.stochastic && noise_prev > 0.0)
        known_t[i] += noise_prev * rng.normal(2, uint64_t(t), i);
    }
    state.data = outpaint_fuse(known_t, state.data, mask, channels);
    ++steps_since_shift;
  }

  if (phase != 0) state.data = cycle_shift(state.data, height, width, channels, 4 - phase);
  return state.data;
}

std::vector<double> spatial_diffusion_sample_volume(LatentVolume volume,
                                                    DenoiserInterface& denoiser,
                                                    const NoiseSchedule& schedule,
                                                    const RaymapVolume* raymaps,
                                                    const std::vector<CameraPose>& frame_poses,
                                                    const std::vector<CameraPose>& anchor_poses,
                                                    const SpatialSamplerOptions& options,
                                                    SpatialWeights* weights_out) {
  schedule.validate();
  volume.validate();
  if (int(frame_poses.size()) != volume.frames)
    throw std::invalid_argument("spatial_diffusion_sample: frame pose count mismatch");
  for (int f = 0; f < volume.frames; ++f) {
    if (volume.anchor[f]) continue;
    for (size_t p = 0; p < volume.frame_pixels(); ++p)
      if (volume.known_mask[f * volume.frame_pixels() + p])
        throw std::invalid_argument("spatial_diffusion_sample: known region on non-anchor frame");
  }

  const SpatialWeights weights =
      compute_spatial_weights(frame_poses, anchor_poses, options.tau_t, options.tau_q);
  if (weights_out) *weights_out = weights;

  // Per-frame scalar entering line "eps = (z - g * sqrt(abar) * v) / ...":
  // the dominant anchor weight in literal mode, 1 in blend mode.
  std::vector<double> gamma(volume.frames, 1.0);
  if (options.weight_mode == WeightMode::literal) {
    for (int j = 0; j < volume.frames; ++j) {
      double g = 0.0;
      for (int i = 0; i < weights.anchors; ++i) g = std::max(g, weights.at(weights.fused, j, i));
      gamma[j] = g;
    }
  }

  const CounterRng rng{options.seed};
  const size_t fv = volume.frame_values();
  const size_t fp = volume.frame_pixels();

  // Preserve the anchor inputs, then start the whole volume from noise.
  const std::vector<double> clean = volume.clean;
  for (size_t i = 0; i < volume.data.size(); ++i) volume.data[i] = rng.normal(0, 0, i);

  DenoiserConditioning cond;
  cond.raymaps = raymaps;
  cond.keyframe_features_a = options.features_a;
  cond.keyframe_features_b = options.features_b;

  for (int t = schedule.steps; t >= 1; --t) {
    const std::vector<double> v_hat = predict_clean(denoiser, volume, t, schedule, cond);

    const double abar = schedule.alpha_bar_at(t);
    const double root_abar = std::sqrt(abar);
    const double inv_root_one_minus = 1.0 / std::sqrt(1.0 - abar);
    std::vector<double> eps(volume.data.size());
    for (int f = 0; f < volume.frames; ++f) {
      const double g = gamma[f];
      for (size_t i = f * fv; i < (f + 1) * fv; ++i)
        eps[i] = (volume.data[i] - g * root_abar * v_hat[i]) * inv_root_one_minus;
    }

    volume.data = ddpm_step(volume.data, eps, schedule, t, rng, 1, options.stochastic);

    // Anchor clamp: known regions follow the forward-noised clean latent.
    const double abar_prev = schedule.alpha_bar_at(t - 1);
    const double root_prev = std::sqrt(abar_prev);
    const double noise_prev = std::sqrt(std::max(0.0, 1.0 - abar_prev));
    for (int f = 0; f < volume.frames; ++f) {
      if (!volume.anchor[f]) continue;
      for (size_t p = 0; p < fp; ++p) {
        if (!volume.known_mask[f * fp + p]) continue;
        for (int c = 0; c < volume.channels; ++c) {
          const size_t i = f * fv + p * volume.channels + c;
          double v = root_prev * clean[i];
          if (options.stochastic && noise_prev > 0.0)
            v += noise_prev * rng.normal(2, uint64_t(t), i);
          volume.data[i] = v;
        }
      }
    }
  }
  return volume.data;
}

LatentVolume make_pair_volume(const KeyframePair& pair, int n_frames) {
  if (n_frames < 2) throw std::invalid_argument("make_pair_volume: need >= 2 frames");
  const int w = pair.source_image.width, h = pair.source_image.height,
            c = pair.source_image.channels;
  if (pair.target_image.width != w || pair.target_image.height != h)
    throw std::invalid_argument("make_pair_volume: pair images differ in size");
  if (pair.target_inpaint_mask.size() != size_t(w) * h)
    throw std::invalid_argument("make_pair_volume: inpaint mask size mismatch");

  LatentVolume volume = LatentVolume::zeros(n_frames, h, w, c);
  volume.anchor.front() = 1;
  volume.anchor.back() = 1;

  const size_t fv = volume.frame_values();
  const size_t fp = volume.frame_pixels();
  for (size_t i = 0; i < fv; ++i) {
    volume.clean[i] = pair.source_image.data[i];
    volume.clean[(n_frames - 1) * fv + i] = pair.target_image.data[i];
  }
  for (size_t p = 0; p < fp; ++p) {
    volume.known_mask[p] = 1;  // source fully known
    volume.known_mask[(n_frames - 1) * fp + p] = pair.target_inpaint_mask[p] ? 0 : 1;
  }
  return volume;
}

std::vector<PerspectiveImage> spatial_diffusion_sample(const KeyframePair& pair,
                                                       DenoiserInterface& denoiser,
                                                       const NoiseSchedule& schedule,
                                                       const RaymapVolume& raymaps,
                                                       const std::vector<CameraPose>& frame_poses,
                                                       const SpatialSamplerOptions& options) {
  LatentVolume volume = make_pair_volume(pair, int(frame_poses.size()));
  const std::vector<CameraPose> anchors{pair.source_pose, pair.target_pose};
  SpatialSamplerOptions opts = options;
  if (opts.features_a.empty())
    opts.features_a = stub_keyframe_features(pair.source_image.data, pair.source_image.width,
                                             pair.source_image.height, pair.source_image.channels);
  if (opts.features_b.empty())
    opts.features_b = stub_keyframe_features(pair.target_image.data, pair.target_image.width,
                                             pair.target_image.height, pair.target_image.channels);
  const std::vector<double> result = spatial_diffusion_sample_volume(
      std::move(volume), denoiser, schedule, &raymaps, frame_poses, anchors, opts);

  // Identity decoder back to frames.
  const int w = pair.source_image.width, h = pair.source_image.height,
            c = pair.source_image.channels;
  const size_t fv = size_t(w) * h * c;
  std::vector<PerspectiveImage> frames(frame_poses.size(), PerspectiveImage(w, h, c));
  for (size_t f = 0; f < frames.size(); ++f)
    for (size_t i = 0; i < fv; ++i) frames[f].data[i] = float(result[f * fv + i]);
  return frames;
}

}  // namespace pvs
