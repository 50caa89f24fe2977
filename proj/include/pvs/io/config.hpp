#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pvs {

/// Pipeline configuration. Serialized as a single JSON document whose keys
/// carry explicit units (_deg, _rad, _m, _px, _count, _ratio). Unknown keys
/// are rejected when parsing.
struct PipelineConfig {
  uint64_t seed = 1;
  std::vector<std::string> stages;  // subset of the stage graph, in order
  std::string output_dir;

  struct Scene {
    std::string source = "synthetic_room";  // or a panorama PNG path
    std::string depth_path;                 // optional PFM for file scenes
    int pano_width_px = 512;
    double room_radius_m = 4.0;
    double max_depth_m = 10.0;
  } scene;

  struct Project {
    int views_count = 4;
    double overlap_ratio = 0.0;
    double hfov_deg = 90.0;
    int out_size_px = 0;  // 0 = derive from the panorama
  } project;

  struct Keyframes {
    std::string mode = "neighbor";  // neighbor | walkin
    int views_count = 6;
    double overlap_ratio = 0.0;
    double hfov_deg = 60.0;
    double walk_ratio = 0.8;
    int out_size_px = 128;
  } keyframes;

  struct Trajectory {
    std::string mode = "interpolate";  // interpolate | star | upsample
    int frames_count = 16;
    double max_rot_step_deg = 30.0;
    double max_trans_step_m = 0.5;
    int directions_count = 8;
    double safety_margin_m = 0.5;
    double frame_rate_fps = 12.0;
  } trajectory;

  struct RaymapCfg {
    int size_px = 32;
  } raymap;

  struct Sample {
    int steps_count = 50;
    double beta_min = 1e-4;
    double beta_max = 0.02;
    double tau_t_m = 4.7;
    double tau_q_rad = 1.68;
    std::string denoiser = "oracle";  // oracle | stub | external:<endpoint>
    std::string weight_mode = "literal";  // literal | blend
    bool stochastic = false;
    int cycle_interval_count = 0;  // panorama mode; 0 = off
  } sample;

  struct Eval {
    std::vector<std::string> metrics{"psnr", "ssim"};
    std::string generated_dir;  // when set, frames are read from disk
    std::string reference_dir;
  } eval;

  void validate() const;
};

std::string serialize_config(const PipelineConfig& config);
PipelineConfig parse_config(const std::string& json_text);

PipelineConfig read_config_file(const std::string& path);
void write_config_file(const std::string& path, const PipelineConfig& config);

bool operator==(const PipelineConfig& a, const PipelineConfig& b);

}  // namespace pvs
