#include "pvs/io/pipeline.hpp"

#include "pvs/core/image_io.hpp"
#include "pvs/core/pose_io.hpp"
#include "pvs/io/report.hpp"
#include "pvs/io/synthetic.hpp"
#include "pvs/metrics/metrics.hpp"
#include "pvs/raymap/raymap.hpp"
#include "pvs/sampler/sampler.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace pvs {

PerspectiveImage render_scene_view(const PanoramaImage& pano, double room_radius,
                                   const CameraPose& pose, const CameraIntrinsics& intrinsics) {
  PerspectiveImage out(intrinsics.width, intrinsics.height, pano.channels);
  const Mat3 k_inv = intrinsics.inverse_matrix();
  const Mat3 cam_to_world = pose.rotation_mat().transpose();
  const Vec3 center = pose.center();
  if (center.norm() >= room_radius)
    throw std::invalid_argument("render_scene_view: camera outside the room sphere");

  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      const Vec3 dir = (cam_to_world * (k_inv * Vec3(x + 0.5, y + 0.5, 1.0))).normalized();
      // Ray-sphere intersection from an interior point.
      const double b = center.dot(dir);
      const double c = center.squaredNorm() - room_radius * room_radius;
      const double t = -b + std::sqrt(b * b - c);
      const Vec3 hit = center + t * dir;
      double u, v;
      direction_to_pano(hit, pano.width, pano.height, &u, &v);
      for (int k = 0; k < pano.channels; ++k)
        out.at(x, y, k) = float(pano.sample_bilinear(u - 0.5, v - 0.5, k));
    }
  }
  return out;
}

DepthMap render_window_depth(const DepthMap& pano_depth, const ViewWindow& window) {
  DepthMap out(window.out_width, window.out_height, pano_depth.max_depth);
  const Mat3 rot = window_rotation(window);
  const double wl = std::tan(window.hfov / 2.0);
  const double hl = std::tan(window.vfov / 2.0);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      const double ry = -(2.0 * (x + 0.5) / out.width - 1.0) * wl;
      const double rz = -(2.0 * (y + 0.5) / out.height - 1.0) * hl;
      const Vec3 dir_cam(1.0, ry, rz);
      const Vec3 dir_world = (rot * dir_cam).normalized();
      // Boundary range along the ray, converted to z-depth along the axis.
      double u, v;
      direction_to_pano(dir_world, pano_depth.width, pano_depth.height, &u, &v);
      const int px = std::clamp(int(u), 0, pano_depth.width - 1);
      const int py = std::clamp(int(v), 0, pano_depth.height - 1);
      const double range = pano_depth.at(px, py);
      const double cos_axis = 1.0 / dir_cam.norm();
      out.at(x, y) = float(std::min(range * cos_axis, pano_depth.max_depth));
    }
  }
  return out;
}

KeyframePair load_keyframe_pair(const std::string& dir, int index) {
  const std::filesystem::path base(dir);
  std::ifstream in(base / "pairs.json");
  if (!in) throw std::runtime_error(dir + "/pairs.json: cannot open");
  const nlohmann::json pairs = nlohmann::json::parse(in);
  if (index < 0 || index >= int(pairs.size()))
    throw std::invalid_argument("load_keyframe_pair: pair index out of range");
  const nlohmann::json& entry = pairs.at(index);

  KeyframePair pair;
  pair.source_image = read_perspective_png((base / entry.at("source").get<std::string>()).string());
  pair.target_image = read_perspective_png((base / entry.at("target").get<std::string>()).string());
  const RasterImage mask = read_png((base / entry.at("mask").get<std::string>()).string());
  pair.target_inpaint_mask.resize(size_t(mask.width) * mask.height);
  for (size_t i = 0; i < pair.target_inpaint_mask.size(); ++i)
    pair.target_inpaint_mask[i] = mask.data[i * mask.channels] > 0.5f ? 1 : 0;
  pair.relation = entry.at("relation") == "walk_in" ? PairRelation::walk_in
                                                    : PairRelation::neighboring;

  const std::vector<PoseRecord> poses = read_pose_json((base / "pair_poses.json").string());
  if (int(poses.size()) < 2 * (index + 1))
    throw std::runtime_error("load_keyframe_pair: pose file too short");
  pair.source_pose = poses[2 * index].pose;
  pair.target_pose = poses[2 * index + 1].pose;
  pair.intrinsics = poses[2 * index].intrinsics;
  return pair;
}

namespace {

namespace fs = std::filesystem;

struct PipelineContext {
  PanoramaImage pano;
  DepthMap pano_depth;
  std::vector<KeyframePair> pairs;
  TrajectorySpec trajectory;
  RaymapVolume raymaps;
  std::vector<PerspectiveImage> sampled;
  std::vector<PerspectiveImage> ground_truth;
};

std::vector<CameraPose> trajectory_poses(const TrajectorySpec& spec) {
  std::vector<CameraPose> poses;
  poses.reserve(spec.keyposes.size());
  for (const auto& kp : spec.keyposes) poses.push_back(kp.pose);
  return poses;
}

void load_scene(const PipelineConfig& config, PipelineContext* ctx, RunManifest* manifest) {
  const int w = config.scene.pano_width_px;
  const int h = w / 2;
  if (config.scene.source == "synthetic_room") {
    ctx->pano = room_panorama(w, h);
    ctx->pano_depth = circular_room_depth(w, h, config.scene.room_radius_m, config.scene.max_depth_m);
  } else if (config.scene.source == "band_limited") {
    ctx->pano = band_limited_panorama(w, h, 3, 3, config.seed);
    ctx->pano_depth = circular_room_depth(w, h, config.scene.room_radius_m, config.scene.max_depth_m);
  } else {
    ctx->pano = read_panorama_png(config.scene.source);
    manifest->inputs.push_back({config.scene.source, hash_file(config.scene.source)});
    if (!config.scene.depth_path.empty()) {
      ctx->pano_depth = read_pfm(config.scene.depth_path, config.scene.max_depth_m);
      manifest->inputs.push_back({config.scene.depth_path, hash_file(config.scene.depth_path)});
    } else {
      ctx->pano_depth = circular_room_depth(ctx->pano.width, ctx->pano.height,
                                            config.scene.room_radius_m, config.scene.max_depth_m);
    }
  }
}

void ensure_pairs(const PipelineConfig& config, PipelineContext* ctx) {
  if (!ctx->pairs.empty()) return;
  const auto& kf = config.keyframes;
  if (kf.mode == "neighbor") {
    ctx->pairs = build_neighboring_pairs(ctx->pano, kf.views_count, kf.overlap_ratio,
                                         deg_to_rad(kf.hfov_deg));
  } else {
    const ViewWindow window =
        ViewWindow::make(0.0, 0.0, deg_to_rad(kf.hfov_deg), 0.0, kf.out_size_px, kf.out_size_px);
    const DepthMap view_depth = render_window_depth(ctx->pano_depth, window);
    const CameraIntrinsics intrinsics = window_camera(window).intrinsics;
    ctx->pairs.push_back(
        build_walkin_pair(ctx->pano, view_depth, window, kf.walk_ratio, intrinsics));
  }
}

void ensure_trajectory(const PipelineConfig& config, PipelineContext* ctx) {
  if (!ctx->trajectory.keyposes.empty()) return;
  ensure_pairs(config, ctx);
  const auto& tr = config.trajectory;
  if (tr.mode == "star") {
    ctx->trajectory = generate_star_trajectory(ctx->pano_depth, Vec3::Zero(), tr.directions_count,
                                               tr.safety_margin_m);
    return;
  }
  const KeyframePair& pair = ctx->pairs.front();
  TrajectorySpec spec;
  spec.frame_rate = tr.frame_rate_fps;
  const int n = tr.frames_count;
  for (int i = 0; i < n; ++i) {
    const double lambda = n > 1 ? double(i) / (n - 1) : 0.0;
    TimedPose tp;
    tp.timestamp = i / tr.frame_rate_fps;
    tp.pose = CameraPose(
        slerp(pair.source_pose.rotation, pair.target_pose.rotation, lambda),
        (1.0 - lambda) * pair.source_pose.translation + lambda * pair.target_pose.translation);
    spec.keyposes.push_back(tp);
  }
  ctx->trajectory = tr.mode == "upsample"
                        ? upsample_trajectory(spec, deg_to_rad(tr.max_rot_step_deg),
                                              tr.max_trans_step_m)
                        : spec;
}

void ensure_ground_truth(const PipelineConfig& config, PipelineContext* ctx) {
  if (!ctx->ground_truth.empty()) return;
  ensure_trajectory(config, ctx);
  const CameraIntrinsics k = ctx->pairs.front().intrinsics;
  for (const auto& kp : ctx->trajectory.keyposes)
    ctx->ground_truth.push_back(
        render_scene_view(ctx->pano, config.scene.room_radius_m, kp.pose, k));
}

std::string frame_name(const char* prefix, size_t index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%04zu.png", prefix, index);
  return buf;
}

void stage_project(const PipelineConfig& config, PipelineContext* ctx, const fs::path& dir,
                   RunManifest* manifest) {
  const PanoramaSplit split =
      split_panorama(ctx->pano, config.project.views_count, config.project.overlap_ratio,
                     deg_to_rad(config.project.hfov_deg), config.project.out_size_px,
                     config.project.out_size_px);
  nlohmann::json windows = nlohmann::json::array();
  for (size_t i = 0; i < split.views.size(); ++i) {
    const auto& [view, window] = split.views[i];
    const std::string path = (dir / frame_name("view", i)).string();
    write_png(path, view);
    manifest->add_output("project", path);
    windows.push_back({{"yaw_rad", window.yaw},
                       {"pitch_rad", window.pitch},
                       {"hfov_rad", window.hfov},
                       {"vfov_rad", window.vfov},
                       {"width_px", window.out_width},
                       {"height_px", window.out_height}});
  }
  const std::string windows_path = (dir / "windows.json").string();
  std::ofstream out(windows_path);
  out << nlohmann::json{{"full_coverage", split.full_coverage}, {"windows", windows}}.dump(2)
      << "\n";
  out.close();
  manifest->add_output("project", windows_path);
}

void stage_keyframes(const PipelineConfig& config, PipelineContext* ctx, const fs::path& dir,
                     RunManifest* manifest) {
  ensure_pairs(config, ctx);
  nlohmann::json pair_manifest = nlohmann::json::array();
  std::vector<PoseRecord> poses;
  for (size_t i = 0; i < ctx->pairs.size(); ++i) {
    const KeyframePair& pair = ctx->pairs[i];
    const std::string src = (dir / frame_name("pair_src", i)).string();
    const std::string tgt = (dir / frame_name("pair_tgt", i)).string();
    const std::string mask = (dir / frame_name("pair_mask", i)).string();
    write_png(src, pair.source_image);
    write_png(tgt, pair.target_image);
    write_mask_png(mask, pair.target_inpaint_mask, pair.target_image.width,
                   pair.target_image.height);
    manifest->add_output("keyframes", src);
    manifest->add_output("keyframes", tgt);
    manifest->add_output("keyframes", mask);
    pair_manifest.push_back(
        {{"source", frame_name("pair_src", i)},
         {"target", frame_name("pair_tgt", i)},
         {"mask", frame_name("pair_mask", i)},
         {"relation", pair.relation == PairRelation::neighboring ? "neighboring" : "walk_in"},
         {"inpaint_area_px", pair.inpaint_area()}});
    poses.push_back({pair.source_pose, pair.intrinsics});
    poses.push_back({pair.target_pose, pair.intrinsics});
  }
  const std::string poses_path = (dir / "pair_poses.json").string();
  write_pose_json(poses_path, poses);
  manifest->add_output("keyframes", poses_path);
  const std::string manifest_path = (dir / "pairs.json").string();
  std::ofstream out(manifest_path);
  out << pair_manifest.dump(2) << "\n";
  out.close();
  manifest->add_output("keyframes", manifest_path);
}

void stage_trajectory(const PipelineConfig& config, PipelineContext* ctx, const fs::path& dir,
                      RunManifest* manifest) {
  ensure_trajectory(config, ctx);
  const CameraIntrinsics k = ctx->pairs.empty() ? CameraIntrinsics{1, 1, 0, 0, 1, 1}
                                                : ctx->pairs.front().intrinsics;
  std::vector<PoseRecord> records;
  for (const auto& kp : ctx->trajectory.keyposes) records.push_back({kp.pose, k});
  const std::string path = (dir / "trajectory.json").string();
  write_pose_json(path, records);
  manifest->add_output("trajectory", path);
}

void stage_raymap(const PipelineConfig& config, PipelineContext* ctx, const fs::path& dir,
                  RunManifest* manifest) {
  ensure_trajectory(config, ctx);
  const std::vector<CameraPose> poses = trajectory_poses(ctx->trajectory);
  const CameraIntrinsics k = ctx->pairs.front().intrinsics;
  ctx->raymaps = stack_raymaps(poses, k, config.raymap.size_px, config.raymap.size_px);
  const std::string path = (dir / "raymaps.plkr").string();
  write_raymap_volume(path, ctx->raymaps, poses);
  manifest->add_output("raymap", path);
  manifest->add_output("raymap", path + ".json");
}

void stage_sample(const PipelineConfig& config, PipelineContext* ctx, const fs::path& dir,
                  RunManifest* manifest) {
  ensure_trajectory(config, ctx);
  const std::vector<CameraPose> poses = trajectory_poses(ctx->trajectory);
  const KeyframePair& pair = ctx->pairs.front();
  if (ctx->raymaps.frames == 0)
    ctx->raymaps = stack_raymaps(poses, pair.intrinsics, config.raymap.size_px,
                                 config.raymap.size_px);

  const NoiseSchedule schedule =
      make_schedule(config.sample.steps_count, config.sample.beta_min, config.sample.beta_max);
  SpatialSamplerOptions options;
  options.tau_t = config.sample.tau_t_m;
  options.tau_q = config.sample.tau_q_rad;
  options.weight_mode =
      config.sample.weight_mode == "blend" ? WeightMode::blend : WeightMode::literal;
  options.stochastic = config.sample.stochastic;
  options.seed = config.seed;

  std::unique_ptr<DenoiserInterface> denoiser;
  const int w = pair.source_image.width, h = pair.source_image.height,
            c = pair.source_image.channels;
  if (config.sample.denoiser == "oracle") {
    ensure_ground_truth(config, ctx);
    std::vector<double> target;
    target.reserve(size_t(poses.size()) * w * h * c);
    for (const auto& frame : ctx->ground_truth)
      target.insert(target.end(), frame.data.begin(), frame.data.end());
    const std::string target_path = (dir / "oracle_target.lvol").string();
    write_latent_volume(target_path, target, int(poses.size()), h, w, c);
    manifest->add_output("sample", target_path);
    denoiser = std::make_unique<OracleCleanDenoiser>(std::move(target), h, w, c);
  } else if (config.sample.denoiser == "stub") {
    denoiser = std::make_unique<StubDenoiser>(config.seed);
  } else if (config.sample.denoiser.rfind("external:", 0) == 0) {
    denoiser = std::make_unique<ExternalDenoiser>(config.sample.denoiser.substr(9));
  } else if (config.sample.denoiser.rfind("oracle:", 0) == 0) {
    int f, th, tw, tc;
    std::vector<double> target =
        read_latent_volume(config.sample.denoiser.substr(7), &f, &th, &tw, &tc);
    denoiser = std::make_unique<OracleCleanDenoiser>(std::move(target), th, tw, tc);
  } else {
    throw std::invalid_argument("sample: unknown denoiser '" + config.sample.denoiser + "'");
  }

  ctx->sampled = spatial_diffusion_sample(pair, *denoiser, schedule, ctx->raymaps, poses, options);
  for (size_t i = 0; i < ctx->sampled.size(); ++i) {
    const std::string path = (dir / frame_name("frame", i)).string();
    write_png(path, ctx->sampled[i]);
    manifest->add_output("sample", path);
  }
  if (!ctx->ground_truth.empty()) {
    for (size_t i = 0; i < ctx->ground_truth.size(); ++i) {
      const std::string path = (dir / frame_name("gt", i)).string();
      write_png(path, ctx->ground_truth[i]);
      manifest->add_output("sample", path);
    }
  }
}

void stage_eval(const PipelineConfig& config, PipelineContext* ctx, const fs::path& dir,
                RunManifest* manifest) {
  if (!config.eval.generated_dir.empty() || !config.eval.reference_dir.empty()) {
    // Frames come from disk instead of the in-memory context.
    auto load_dir = [](const std::string& path) {
      std::vector<std::string> files;
      for (const auto& entry : fs::directory_iterator(path))
        if (entry.path().extension() == ".png") files.push_back(entry.path().string());
      std::sort(files.begin(), files.end());
      std::vector<PerspectiveImage> frames;
      for (const auto& file : files) frames.push_back(read_perspective_png(file));
      return frames;
    };
    ctx->sampled = load_dir(config.eval.generated_dir);
    ctx->ground_truth = load_dir(config.eval.reference_dir);
    if (ctx->sampled.size() != ctx->ground_truth.size())
      throw std::runtime_error("eval: generated and reference directories differ in frame count");
  }
  if (ctx->sampled.empty())
    throw std::runtime_error("eval: no sampled frames; run the sample stage first");
  ensure_ground_truth(config, ctx);
  const auto& metrics = config.eval.metrics;
  const bool want_psnr = std::count(metrics.begin(), metrics.end(), "psnr");
  const bool want_ssim = std::count(metrics.begin(), metrics.end(), "ssim");
  const bool want_mtsed = std::count(metrics.begin(), metrics.end(), "mtsed");
  const bool want_fvd = std::count(metrics.begin(), metrics.end(), "fvd");

  ReportTable table;
  table.columns = {"frame"};
  if (want_psnr) table.columns.push_back("psnr_db");
  if (want_ssim) table.columns.push_back("ssim");

  PlotSeries psnr_series{"psnr_db", {}, {}};
  const size_t n = std::min(ctx->sampled.size(), ctx->ground_truth.size());
  for (size_t i = 0; i < n; ++i) {
    std::vector<std::string> row{std::to_string(i)};
    if (want_psnr) {
      const double v = psnr(ctx->sampled[i], ctx->ground_truth[i]);
      row.push_back(format_metric(v));
      psnr_series.x.push_back(double(i));
      psnr_series.y.push_back(std::isfinite(v) ? v : 99.0);
    }
    if (want_ssim) row.push_back(format_metric(ssim(ctx->sampled[i], ctx->ground_truth[i])));
    table.rows.push_back(row);
  }

  ReportTable summary;
  summary.columns = {"metric", "value"};
  if (want_mtsed) {
    const std::vector<CameraPose> poses = trajectory_poses(ctx->trajectory);
    std::vector<Correspondences> matches;
    std::vector<CameraPose> rels;
    for (size_t i = 0; i + 1 < poses.size(); ++i) {
      const CameraPose rel = relative_pose(poses[i], poses[i + 1]);
      if (rel.translation.norm() < 1e-9) continue;  // pure rotation is degenerate
      matches.push_back(synthetic_correspondences(poses[i], poses[i + 1],
                                                  ctx->pairs.front().intrinsics, 50, config.seed));
      rels.push_back(rel);
    }
    const double score =
        matches.empty() ? 0.0
                        : mtsed_sequence(matches, rels, ctx->pairs.front().intrinsics);
    summary.rows.push_back({"mtsed", format_metric(score)});
  }
  if (want_fvd && n >= 9) {
    auto windows = [&](const std::vector<PerspectiveImage>& frames) {
      std::vector<std::vector<double>> sequences;
      for (size_t start = 0; start + 8 <= frames.size(); ++start) {
        std::vector<std::vector<double>> window_features;
        for (size_t i = start; i < start + 8; ++i)
          window_features.push_back(synthetic_frame_features(frames[i]));
        sequences.push_back(video_feature_stack(window_features));
      }
      return sequences;
    };
    const auto real = windows(ctx->ground_truth);
    const auto generated = windows(ctx->sampled);
    if (real.size() >= 2 && generated.size() >= 2)
      summary.rows.push_back({"fvd", format_metric(frechet_distance(feature_distribution(real),
                                                                    feature_distribution(generated)))});
  }

  const std::string csv_path = (dir / "metrics.csv").string();
  const std::string json_path = (dir / "metrics.json").string();
  emit_report(table, ReportFormat::csv, csv_path);
  emit_report(table, ReportFormat::json, json_path);
  manifest->add_output("eval", csv_path);
  manifest->add_output("eval", json_path);
  if (!summary.rows.empty()) {
    const std::string summary_path = (dir / "summary.csv").string();
    emit_report(summary, ReportFormat::csv, summary_path);
    manifest->add_output("eval", summary_path);
  }
  if (want_psnr && !psnr_series.x.empty()) {
    const std::string plot_path = (dir / "psnr_vs_frame.svg").string();
    emit_plot({psnr_series}, "frame", "psnr_db", plot_path);
    manifest->add_output("eval", plot_path);
  }
}

}  // namespace

RunManifest run_pipeline(const PipelineConfig& config) {
  config.validate();
  const fs::path dir = config.output_dir.empty() ? fs::path("pvs_out") : fs::path(config.output_dir);
  fs::create_directories(dir);

  RunManifest manifest;
  manifest.tool_version = kToolVersion;
  manifest.seed = config.seed;
  manifest.base_dir = dir.string();
  manifest.config_hash = hash_bytes(serialize_config(config));

  PipelineContext ctx;
  load_scene(config, &ctx, &manifest);
  const std::string pano_path = (dir / "pano.png").string();
  write_png(pano_path, ctx.pano, 16);
  manifest.inputs.push_back({"pano.png", hash_file(pano_path)});

  std::vector<std::string> stages = config.stages;
  if (stages.empty())
    stages = {"project", "keyframes", "trajectory", "raymap", "sample", "eval"};

  for (const std::string& stage : stages) {
    const auto start = std::chrono::steady_clock::now();
    if (stage == "project") stage_project(config, &ctx, dir, &manifest);
    else if (stage == "keyframes") stage_keyframes(config, &ctx, dir, &manifest);
    else if (stage == "trajectory") stage_trajectory(config, &ctx, dir, &manifest);
    else if (stage == "raymap") stage_raymap(config, &ctx, dir, &manifest);
    else if (stage == "sample") stage_sample(config, &ctx, dir, &manifest);
    else if (stage == "eval") stage_eval(config, &ctx, dir, &manifest);
    else throw std::invalid_argument("run_pipeline: unknown stage '" + stage + "'");
    const auto end = std::chrono::steady_clock::now();
    manifest.set_stage_time(stage,
                            std::chrono::duration<double, std::milli>(end - start).count());
  }

  manifest.write((dir / "manifest.json").string());
  return manifest;
}

}  // namespace pvs
