#include "pvs/core/image_io.hpp"
#include "pvs/core/pose_io.hpp"
#include "pvs/io/config.hpp"
#include "pvs/io/pipeline.hpp"
#include "pvs/io/report.hpp"
#include "pvs/io/synthetic.hpp"
#include "pvs/metrics/metrics.hpp"
#include "pvs/raymap/raymap.hpp"
#include "pvs/sampler/sampler.hpp"
#include "pvs/trajectory/trajectory.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

namespace fs = std::filesystem;
using namespace pvs;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

std::pair<int, int> parse_size(const std::string& text) {
  const size_t x = text.find('x');
  if (x == std::string::npos) throw std::invalid_argument("size must be WxH, e.g. 256x256");
  return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
}

std::vector<std::string> sorted_pngs(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".png") files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  return files;
}

std::unique_ptr<DenoiserInterface> make_denoiser(const std::string& spec, uint64_t seed) {
  if (spec == "stub") return std::make_unique<StubDenoiser>(seed);
  if (spec.rfind("oracle:", 0) == 0) {
    int f, h, w, c;
    std::vector<double> target = read_latent_volume(spec.substr(7), &f, &h, &w, &c);
    return std::make_unique<OracleCleanDenoiser>(std::move(target), h, w, c);
  }
  if (spec.rfind("external:", 0) == 0)
    return std::make_unique<ExternalDenoiser>(spec.substr(9));
  throw std::invalid_argument("unknown denoiser '" + spec +
                              "' (use oracle:<file>, stub or external:<endpoint>)");
}

// ---------------------------------------------------------------------------
// project
// ---------------------------------------------------------------------------

struct ProjectArgs {
  std::string input, output, mask_output, direction = "pano2persp";
  double yaw = 0.0, pitch = 0.0, hfov = 90.0, vfov = 0.0;
  std::string out_size = "256x256", canvas_size;
};

int run_project(const ProjectArgs& args) {
  const auto [w, h] = parse_size(args.out_size);
  const ViewWindow window = ViewWindow::make(deg_to_rad(args.yaw), deg_to_rad(args.pitch),
                                             deg_to_rad(args.hfov),
                                             args.vfov > 0.0 ? deg_to_rad(args.vfov) : 0.0, w, h);
  if (args.direction == "pano2persp") {
    const PanoramaImage pano = read_panorama_png(args.input);
    const ProjectionResult result = pano_to_perspective(pano, window);
    write_png(args.output, result.image);
    if (!args.mask_output.empty())
      write_mask_png(args.mask_output, result.mask.data, result.mask.width, result.mask.height);
  } else if (args.direction == "persp2pano") {
    const PerspectiveImage persp = read_perspective_png(args.input);
    int cw = persp.width * 4, ch = persp.width * 2;
    if (!args.canvas_size.empty()) std::tie(cw, ch) = parse_size(args.canvas_size);
    const SplatResult result = perspective_to_pano(persp, window, cw, ch);
    write_png(args.output, result.pano);
    if (!args.mask_output.empty())
      write_mask_png(args.mask_output, result.coverage.data, result.coverage.width,
                     result.coverage.height);
  } else {
    throw std::invalid_argument("direction must be pano2persp or persp2pano");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// keyframes
// ---------------------------------------------------------------------------

struct KeyframesArgs {
  std::string input, depth, out_dir = ".", mode = "neighbor";
  int views = 6;
  double overlap = 0.0, hfov = 60.0, walk_ratio = 0.8, max_depth = 10.0;
  int out_size = 0;
};

int run_keyframes(const KeyframesArgs& args) {
  const PanoramaImage pano = read_panorama_png(args.input);
  fs::create_directories(args.out_dir);

  std::vector<KeyframePair> pairs;
  if (args.mode == "neighbor") {
    pairs = build_neighboring_pairs(pano, args.views, args.overlap, deg_to_rad(args.hfov));
  } else if (args.mode == "walkin") {
    const int size = args.out_size > 0
                         ? args.out_size
                         : std::max(1, int(std::lround(args.hfov / 360.0 * pano.width)));
    const ViewWindow window =
        ViewWindow::make(0.0, 0.0, deg_to_rad(args.hfov), 0.0, size, size);
    DepthMap view_depth(0, 0, 0.0);
    if (!args.depth.empty()) {
      view_depth = read_pfm(args.depth, args.max_depth);
      if (view_depth.width != size || view_depth.height != size)
        throw std::invalid_argument("keyframes: depth size does not match the view size");
    } else {
      throw std::invalid_argument("keyframes: walkin mode requires --depth (PFM for the view)");
    }
    pairs.push_back(build_walkin_pair(pano, view_depth, window, args.walk_ratio,
                                      window_camera(window).intrinsics));
  } else {
    throw std::invalid_argument("mode must be neighbor or walkin");
  }

  std::vector<PoseRecord> poses;
  nlohmann::json pair_manifest = nlohmann::json::array();
  for (size_t i = 0; i < pairs.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "pair_src_%04zu.png", i);
    const std::string src = name;
    std::snprintf(name, sizeof(name), "pair_tgt_%04zu.png", i);
    const std::string tgt = name;
    std::snprintf(name, sizeof(name), "pair_mask_%04zu.png", i);
    const std::string mask = name;
    write_png((fs::path(args.out_dir) / src).string(), pairs[i].source_image);
    write_png((fs::path(args.out_dir) / tgt).string(), pairs[i].target_image);
    write_mask_png((fs::path(args.out_dir) / mask).string(), pairs[i].target_inpaint_mask,
                   pairs[i].target_image.width, pairs[i].target_image.height);
    pair_manifest.push_back(
        {{"source", src},
         {"target", tgt},
         {"mask", mask},
         {"relation", pairs[i].relation == PairRelation::walk_in ? "walk_in" : "neighboring"},
         {"inpaint_area_px", pairs[i].inpaint_area()}});
    poses.push_back({pairs[i].source_pose, pairs[i].intrinsics});
    poses.push_back({pairs[i].target_pose, pairs[i].intrinsics});
  }
  write_pose_json((fs::path(args.out_dir) / "pair_poses.json").string(), poses);
  std::ofstream out(fs::path(args.out_dir) / "pairs.json");
  out << pair_manifest.dump(2) << "\n";
  std::cout << "wrote " << pairs.size() << " pair(s) to " << args.out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// trajectory
// ---------------------------------------------------------------------------

struct TrajectoryArgs {
  std::string mode = "interpolate", poses, output, depth;
  int frames = 16, directions = 8;
  double max_rot_step = 30.0, max_trans_step = 0.5;
  double margin = 0.5, max_depth = 20.0, frame_rate = 12.0;
};

int run_trajectory(const TrajectoryArgs& args) {
  TrajectorySpec spec;
  CameraIntrinsics intrinsics{1.0, 1.0, 0.5, 0.5, 1, 1};

  if (args.mode == "star") {
    if (args.depth.empty())
      throw std::invalid_argument("trajectory: star mode requires --depth (panorama PFM)");
    const DepthMap depth = read_pfm(args.depth, args.max_depth);
    StarOptions options;
    options.frame_rate = args.frame_rate;
    spec = generate_star_trajectory(depth, Vec3::Zero(), args.directions, args.margin, options);
  } else {
    if (args.poses.empty())
      throw std::invalid_argument("trajectory: --poses is required for this mode");
    const std::vector<PoseRecord> records = read_pose_json(args.poses);
    if (records.size() < 2) throw std::invalid_argument("trajectory: need at least two poses");
    intrinsics = records.front().intrinsics;

    if (args.mode == "interpolate") {
      spec.frame_rate = args.frame_rate;
      // Uniform slerp/linear interpolation between consecutive keyposes.
      const int per_segment = std::max(1, (args.frames - 1) / std::max<int>(1, records.size() - 1));
      int index = 0;
      for (size_t s = 0; s + 1 < records.size(); ++s) {
        for (int k = 0; k < per_segment; ++k) {
          const double lambda = double(k) / per_segment;
          spec.keyposes.push_back(
              {index / args.frame_rate,
               CameraPose(slerp(records[s].pose.rotation, records[s + 1].pose.rotation, lambda),
                          (1.0 - lambda) * records[s].pose.translation +
                              lambda * records[s + 1].pose.translation)});
          ++index;
        }
      }
      spec.keyposes.push_back({index / args.frame_rate, records.back().pose});
    } else if (args.mode == "upsample") {
      spec.frame_rate = args.frame_rate;
      for (size_t i = 0; i < records.size(); ++i)
        spec.keyposes.push_back({i / args.frame_rate, records[i].pose});
      spec = upsample_trajectory(spec, deg_to_rad(args.max_rot_step), args.max_trans_step);
    } else {
      throw std::invalid_argument("trajectory: mode must be star, interpolate or upsample");
    }
  }

  std::vector<PoseRecord> out_records;
  for (const auto& kp : spec.keyposes) out_records.push_back({kp.pose, intrinsics});
  write_pose_json(args.output, out_records);
  std::cout << "wrote " << out_records.size() << " poses to " << args.output << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// raymap
// ---------------------------------------------------------------------------

struct RaymapArgs {
  std::string poses, output, size = "32x32";
  bool normalize = false;
};

int run_raymap(const RaymapArgs& args) {
  const std::vector<PoseRecord> records = read_pose_json(args.poses);
  if (records.empty()) throw std::invalid_argument("raymap: empty pose file");
  const auto [w, h] = parse_size(args.size);

  std::vector<CameraPose> poses;
  for (const auto& r : records) poses.push_back(r.pose);
  RaymapVolume volume = stack_raymaps(poses, records.front().intrinsics, w, h);
  if (args.normalize) {
    for (int f = 0; f < volume.frames; ++f) {
      Raymap raymap = normalize_raymap(volume_slice(volume, f));
      double* dst = volume.data.data() + volume.frame_stride() * f;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const size_t i = (size_t(y) * w + x) * 3;
          const size_t o = (size_t(y) * w + x) * 6;
          for (int c = 0; c < 3; ++c) {
            dst[o + c] = raymap.moments[i + c];
            dst[o + 3 + c] = raymap.directions[i + c];
          }
        }
    }
  }
  write_raymap_volume(args.output, volume, poses);
  std::cout << "wrote " << volume.frames << " raymaps (" << w << "x" << h << ") to "
            << args.output << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// sample
// ---------------------------------------------------------------------------

struct SampleArgs {
  std::string mode = "video";
  int steps = 50;
  double tau_t = 4.7, tau_q = 1.68;
  uint64_t seed = 1;
  std::string denoiser = "stub", weight_mode = "literal";
  bool stochastic = false;
  // panorama mode
  std::string known, mask, output = "sampled.png";
  int cycle_interval = 0;
  // video mode
  std::string pair_dir, trajectory, raymaps, out_dir = ".";
  int pair_index = 0;
};

int run_sample(const SampleArgs& args) {
  const NoiseSchedule schedule = make_schedule(args.steps);
  std::unique_ptr<DenoiserInterface> denoiser = make_denoiser(args.denoiser, args.seed);

  if (args.mode == "panorama") {
    if (args.known.empty() || args.mask.empty())
      throw std::invalid_argument("sample: panorama mode needs --known and --mask");
    const PanoramaImage known = read_panorama_png(args.known);
    const RasterImage mask_raster = read_png(args.mask);
    if (mask_raster.width != known.width || mask_raster.height != known.height)
      throw std::invalid_argument("sample: mask size does not match the known image");
    std::vector<uint8_t> mask(size_t(known.width) * known.height);
    for (size_t i = 0; i < mask.size(); ++i)
      mask[i] = mask_raster.data[i * mask_raster.channels] > 0.5f ? 1 : 0;

    SamplerOptions options;
    options.stochastic = args.stochastic;
    options.seed = args.seed;
    const std::vector<double> known_latent(known.data.begin(), known.data.end());
    const std::vector<double> result =
        panorama_outpaint_sample(*denoiser, known_latent, mask, known.height, known.width,
                                 known.channels, schedule, args.cycle_interval, options);
    PanoramaImage out(known.width, known.height, known.channels);
    for (size_t i = 0; i < result.size(); ++i)
      out.data[i] = float(std::clamp(result[i], 0.0, 1.0));
    write_png(args.output, out);
    std::cout << "wrote " << args.output << "\n";
    return 0;
  }

  if (args.mode != "video") throw std::invalid_argument("sample: mode must be panorama or video");
  if (args.pair_dir.empty() || args.trajectory.empty())
    throw std::invalid_argument("sample: video mode needs --pair-dir and --trajectory");

  const KeyframePair pair = load_keyframe_pair(args.pair_dir, args.pair_index);
  const std::vector<PoseRecord> records = read_pose_json(args.trajectory);
  std::vector<CameraPose> poses;
  for (const auto& r : records) poses.push_back(r.pose);

  RaymapVolume raymaps;
  if (!args.raymaps.empty()) raymaps = read_raymap_volume(args.raymaps);
  else raymaps = stack_raymaps(poses, pair.intrinsics, 32, 32);

  SpatialSamplerOptions options;
  options.tau_t = args.tau_t;
  options.tau_q = args.tau_q;
  options.weight_mode = args.weight_mode == "blend" ? WeightMode::blend : WeightMode::literal;
  options.stochastic = args.stochastic;
  options.seed = args.seed;

  fs::create_directories(args.out_dir);
  const std::vector<PerspectiveImage> frames =
      spatial_diffusion_sample(pair, *denoiser, schedule, raymaps, poses, options);
  for (size_t i = 0; i < frames.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "frame_%04zu.png", i);
    PerspectiveImage clamped = frames[i];
    for (auto& v : clamped.data) v = std::clamp(v, 0.0f, 1.0f);
    write_png((fs::path(args.out_dir) / name).string(), clamped);
  }
  std::cout << "wrote " << frames.size() << " frames to " << args.out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string metric = "psnr";
  std::string generated, reference;
  std::string correspondences;
  std::string features_real, features_generated;
  std::string out_csv = "metrics.csv", out_json;
};

int run_eval(const EvalArgs& args) {
  ReportTable table;

  if (args.metric == "psnr" || args.metric == "ssim") {
    if (args.generated.empty() || args.reference.empty())
      throw std::invalid_argument("eval: --generated and --reference directories are required");
    const std::vector<std::string> gen = sorted_pngs(args.generated);
    const std::vector<std::string> ref = sorted_pngs(args.reference);
    if (gen.size() != ref.size())
      throw std::invalid_argument("eval: directories hold different frame counts");
    table.columns = {"frame", args.metric};
    for (size_t i = 0; i < gen.size(); ++i) {
      const PerspectiveImage a = read_perspective_png(gen[i]);
      const PerspectiveImage b = read_perspective_png(ref[i]);
      const double value = args.metric == "psnr" ? psnr(a, b) : ssim(a, b);
      table.rows.push_back({std::to_string(i), format_metric(value)});
    }
  } else if (args.metric == "mtsed") {
    if (args.correspondences.empty())
      throw std::invalid_argument("eval: mtsed requires --correspondences");
    const CorrespondenceFile file = read_correspondence_file(args.correspondences);
    table.columns = {"pair", "median_passes"};
    size_t passing = 0;
    for (size_t i = 0; i < file.pairs.size(); ++i) {
      const bool pass = mtsed_pair(file.pairs[i], file.relative_poses[i], file.intrinsics,
                                   file.intrinsics);
      passing += pass;
      table.rows.push_back({std::to_string(i), pass ? "1" : "0"});
    }
    table.rows.push_back(
        {"sequence_score",
         format_metric(file.pairs.empty() ? 0.0 : double(passing) / file.pairs.size())});
  } else if (args.metric == "fvd") {
    if (args.features_real.empty() || args.features_generated.empty())
      throw std::invalid_argument("eval: fvd requires --features-real and --features-generated");
    const auto real = read_feature_file(args.features_real);
    const auto generated = read_feature_file(args.features_generated);
    const double value =
        frechet_distance(feature_distribution(real), feature_distribution(generated));
    table.columns = {"metric", "value"};
    table.rows.push_back({"fvd", format_metric(value)});
  } else {
    throw std::invalid_argument("eval: metric must be psnr, ssim, mtsed or fvd");
  }

  emit_report(table, ReportFormat::csv, args.out_csv);
  if (!args.out_json.empty()) emit_report(table, ReportFormat::json, args.out_json);
  std::cout << table_to_csv(table);
  return 0;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepArgs {
  double tau_t_min = 2.0, tau_t_max = 7.0;
  double tau_q_min = 0.5, tau_q_max = 3.0;
  double step = 0.5;
  double tau_t_ref = 4.7, tau_q_ref = 1.68;
  int frames = 12, steps = 8;
  uint64_t seed = 1;
  std::string out_dir;
};

/// Toy-scene temperature sweep: frames between two anchors whose ground truth
/// is the weight blend at reference temperatures; each grid point scores the
/// sampler output against that target. Produces the score surface as CSV and
/// an SVG heatmap.
int run_sweep(const SweepArgs& args) {
  std::string out_dir = args.out_dir;
  if (out_dir.empty()) {
    const char* cache = std::getenv("PVS_CACHE_DIR");
    out_dir = cache ? std::string(cache) + "/sweep" : "sweep";
  }
  fs::create_directories(out_dir);

  const int h = 16, w = 16, c = 1;
  const CounterRng rng{args.seed};
  std::vector<double> anchor_a(size_t(h) * w), anchor_b(size_t(h) * w);
  for (size_t i = 0; i < anchor_a.size(); ++i) {
    anchor_a[i] = rng.uniform(1, 0, i);
    anchor_b[i] = rng.uniform(2, 0, i);
  }

  std::vector<CameraPose> poses;
  for (int i = 0; i < args.frames; ++i) {
    const double lambda = double(i) / (args.frames - 1);
    poses.push_back(CameraPose(
        slerp(Quat::identity(), Quat::from_axis_angle(Vec3(0, 0, 1), kPi / 3.0), lambda),
        Vec3(3.0 * lambda, 0.0, 0.0)));
  }
  const std::vector<CameraPose> anchors{poses.front(), poses.back()};

  auto blend_target = [&](double tau_t, double tau_q) {
    const SpatialWeights weights = compute_spatial_weights(poses, anchors, tau_t, tau_q);
    std::vector<double> target(size_t(args.frames) * h * w);
    for (int f = 0; f < args.frames; ++f)
      for (size_t i = 0; i < anchor_a.size(); ++i)
        target[f * anchor_a.size() + i] = weights.at(weights.fused, f, 0) * anchor_a[i] +
                                          weights.at(weights.fused, f, 1) * anchor_b[i];
    return target;
  };

  const std::vector<double> reference = blend_target(args.tau_t_ref, args.tau_q_ref);
  const NoiseSchedule schedule = make_schedule(args.steps);

  const int cols = int((args.tau_t_max - args.tau_t_min) / args.step + 1.5);
  const int rows = int((args.tau_q_max - args.tau_q_min) / args.step + 1.5);
  std::vector<double> scores(size_t(cols) * rows);
  std::vector<double> t_ticks, q_ticks;
  for (int i = 0; i < cols; ++i) t_ticks.push_back(args.tau_t_min + i * args.step);
  for (int j = 0; j < rows; ++j) q_ticks.push_back(args.tau_q_min + j * args.step);

  ReportTable table;
  table.columns = {"tau_t_m", "tau_q_rad", "psnr_db"};
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) {
      OracleCleanDenoiser denoiser(blend_target(t_ticks[i], q_ticks[j]), h, w, c);
      SpatialSamplerOptions options;
      options.tau_t = t_ticks[i];
      options.tau_q = q_ticks[j];
      options.weight_mode = WeightMode::blend;
      const std::vector<double> out =
          spatial_diffusion_sample_volume(LatentVolume::zeros(args.frames, h, w, c), denoiser,
                                          schedule, nullptr, poses, anchors, options);
      double mse = 0.0;
      for (size_t k = 0; k < out.size(); ++k) {
        const double d = out[k] - reference[k];
        mse += d * d;
      }
      mse /= double(out.size());
      const double score = mse == 0.0 ? 99.0 : 10.0 * std::log10(1.0 / mse);
      scores[size_t(j) * cols + i] = score;
      table.rows.push_back(
          {format_metric(t_ticks[i]), format_metric(q_ticks[j]), format_metric(score)});
    }
  }

  emit_report(table, ReportFormat::csv, (fs::path(out_dir) / "sweep.csv").string());
  std::ofstream svg(fs::path(out_dir) / "sweep.svg");
  svg << svg_heatmap(scores, cols, rows, t_ticks, q_ticks, "tau_T (m)", "tau_q (rad)");
  std::cout << "wrote sweep surface (" << cols << "x" << rows << ") to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"panoview: panorama-to-video view synthesis toolkit"};
  app.require_subcommand(1);

  ProjectArgs project_args;
  CLI::App* project = app.add_subcommand("project", "equirectangular <-> perspective projection");
  project->add_option("--input", project_args.input, "input image (PNG)")->required();
  project->add_option("--output", project_args.output, "output image (PNG)")->required();
  project->add_option("--direction", project_args.direction, "pano2persp | persp2pano");
  project->add_option("--yaw", project_args.yaw, "yaw in degrees");
  project->add_option("--pitch", project_args.pitch, "pitch in degrees");
  project->add_option("--hfov", project_args.hfov, "horizontal fov in degrees");
  project->add_option("--vfov", project_args.vfov, "vertical fov in degrees (0 = from aspect)");
  project->add_option("--out-size", project_args.out_size, "perspective size WxH");
  project->add_option("--canvas-size", project_args.canvas_size, "panorama canvas WxH");
  project->add_option("--mask", project_args.mask_output, "write the visibility/coverage mask");

  KeyframesArgs keyframes_args;
  CLI::App* keyframes = app.add_subcommand("keyframes", "keyframe pair construction");
  keyframes->add_option("--input", keyframes_args.input, "panorama (PNG)")->required();
  keyframes->add_option("--mode", keyframes_args.mode, "neighbor | walkin");
  keyframes->add_option("--views", keyframes_args.views, "number of views");
  keyframes->add_option("--overlap", keyframes_args.overlap, "overlap fraction [0, 2/3]");
  keyframes->add_option("--hfov", keyframes_args.hfov, "view fov in degrees");
  keyframes->add_option("--walk-ratio", keyframes_args.walk_ratio, "walk-in ratio [0, 1)");
  keyframes->add_option("--depth", keyframes_args.depth, "view depth map (PFM, walkin mode)");
  keyframes->add_option("--max-depth", keyframes_args.max_depth, "depth map max range (m)");
  keyframes->add_option("--out-size", keyframes_args.out_size, "view size in pixels");
  keyframes->add_option("--out-dir", keyframes_args.out_dir, "output directory");

  TrajectoryArgs trajectory_args;
  CLI::App* trajectory = app.add_subcommand("trajectory", "camera path generation");
  trajectory->add_option("--mode", trajectory_args.mode, "star | interpolate | upsample");
  trajectory->add_option("--poses", trajectory_args.poses, "input pose JSON");
  trajectory->add_option("--output", trajectory_args.output, "output pose JSON")->required();
  trajectory->add_option("--frames", trajectory_args.frames, "frame count (interpolate)");
  trajectory->add_option("--max-rot-step", trajectory_args.max_rot_step, "degrees (upsample)");
  trajectory->add_option("--max-trans-step", trajectory_args.max_trans_step, "meters (upsample)");
  trajectory->add_option("--depth", trajectory_args.depth, "panorama depth PFM (star)");
  trajectory->add_option("--max-depth", trajectory_args.max_depth, "depth max range (m)");
  trajectory->add_option("--directions", trajectory_args.directions, "probe directions (star)");
  trajectory->add_option("--margin", trajectory_args.margin, "safety margin in meters (star)");
  trajectory->add_option("--frame-rate", trajectory_args.frame_rate, "frames per second");

  RaymapArgs raymap_args;
  CLI::App* raymap = app.add_subcommand("raymap", "Pluecker raymap volumes from poses");
  raymap->add_option("--poses", raymap_args.poses, "pose JSON")->required();
  raymap->add_option("--output", raymap_args.output, "output .plkr file")->required();
  raymap->add_option("--size", raymap_args.size, "raymap size WxH");
  raymap->add_flag("--normalize", raymap_args.normalize, "normalize directions to unit length");

  SampleArgs sample_args;
  CLI::App* sample = app.add_subcommand("sample", "diffusion sampling");
  sample->add_option("--mode", sample_args.mode, "panorama | video");
  sample->add_option("--steps", sample_args.steps, "reverse steps T");
  sample->add_option("--tau-t", sample_args.tau_t, "position temperature (m)");
  sample->add_option("--tau-q", sample_args.tau_q, "orientation temperature (rad)");
  sample->add_option("--seed", sample_args.seed, "rng seed");
  sample->add_option("--denoiser", sample_args.denoiser, "oracle:<file> | stub | external:<endpoint>");
  sample->add_option("--weight-mode", sample_args.weight_mode, "literal | blend");
  sample->add_flag("--stochastic", sample_args.stochastic, "enable sigma noise");
  sample->add_option("--known", sample_args.known, "known image (panorama mode)");
  sample->add_option("--mask", sample_args.mask, "known-region mask PNG (panorama mode)");
  sample->add_option("--cycle-interval", sample_args.cycle_interval,
                     "steps between quarter shifts (panorama mode, 0 = off)");
  sample->add_option("--output", sample_args.output, "output PNG (panorama mode)");
  sample->add_option("--pair-dir", sample_args.pair_dir, "keyframes output dir (video mode)");
  sample->add_option("--pair-index", sample_args.pair_index, "pair index (video mode)");
  sample->add_option("--trajectory", sample_args.trajectory, "trajectory pose JSON (video mode)");
  sample->add_option("--raymaps", sample_args.raymaps, ".plkr raymap volume (video mode)");
  sample->add_option("--out-dir", sample_args.out_dir, "frame output dir (video mode)");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "image/video consistency metrics");
  eval->add_option("--metric", eval_args.metric, "psnr | ssim | mtsed | fvd");
  eval->add_option("--generated", eval_args.generated, "generated frame directory");
  eval->add_option("--reference", eval_args.reference, "reference frame directory");
  eval->add_option("--correspondences", eval_args.correspondences, "correspondence JSON (mtsed)");
  eval->add_option("--features-real", eval_args.features_real, "FEAT file (fvd)");
  eval->add_option("--features-generated", eval_args.features_generated, "FEAT file (fvd)");
  eval->add_option("--out-csv", eval_args.out_csv, "CSV report path");
  eval->add_option("--out-json", eval_args.out_json, "JSON report path");

  std::string config_path, pipeline_output, init_path;
  CLI::App* pipeline = app.add_subcommand("pipeline", "run the staged pipeline from a config");
  pipeline->add_option("--config", config_path, "pipeline config JSON");
  pipeline->add_option("--output", pipeline_output, "override output directory");
  pipeline->add_option("--init", init_path, "write a default config to this path and exit");

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "temperature sweep surface (tau_T x tau_q)");
  sweep->add_option("--tau-t-min", sweep_args.tau_t_min, "grid minimum (m)");
  sweep->add_option("--tau-t-max", sweep_args.tau_t_max, "grid maximum (m)");
  sweep->add_option("--tau-q-min", sweep_args.tau_q_min, "grid minimum (rad)");
  sweep->add_option("--tau-q-max", sweep_args.tau_q_max, "grid maximum (rad)");
  sweep->add_option("--step", sweep_args.step, "grid step");
  sweep->add_option("--tau-t-ref", sweep_args.tau_t_ref, "reference temperature (m)");
  sweep->add_option("--tau-q-ref", sweep_args.tau_q_ref, "reference temperature (rad)");
  sweep->add_option("--frames", sweep_args.frames, "toy scene frame count");
  sweep->add_option("--steps", sweep_args.steps, "sampler steps per grid point");
  sweep->add_option("--seed", sweep_args.seed, "rng seed");
  sweep->add_option("--out-dir", sweep_args.out_dir, "output directory (default $PVS_CACHE_DIR/sweep)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitValidation;
  }

  try {
    if (*project) return run_project(project_args);
    if (*keyframes) return run_keyframes(keyframes_args);
    if (*trajectory) return run_trajectory(trajectory_args);
    if (*raymap) return run_raymap(raymap_args);
    if (*sample) return run_sample(sample_args);
    if (*eval) return run_eval(eval_args);
    if (*pipeline) {
      if (!init_path.empty()) {
        write_config_file(init_path, PipelineConfig{});
        std::cout << "wrote default config to " << init_path << "\n";
        return 0;
      }
      if (config_path.empty())
        throw std::invalid_argument("pipeline: --config (or --init) is required");
      PipelineConfig config = read_config_file(config_path);
      if (!pipeline_output.empty()) config.output_dir = pipeline_output;
      const RunManifest manifest = run_pipeline(config);
      std::cout << "pipeline complete; manifest at "
                << (fs::path(config.output_dir.empty() ? "pvs_out" : config.output_dir) /
                    "manifest.json")
                << "\n";
      return 0;
    }
    if (*sweep) return run_sweep(sweep_args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
