#include "pvs/io/config.hpp"

#include "pvs/core/types.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <stdexcept>

namespace pvs {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& scope) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw std::invalid_argument("config: unknown key '" + scope + it.key() + "'");
}

}  // namespace

void PipelineConfig::validate() const {
  static const std::set<std::string> known_stages{"project", "keyframes", "trajectory",
                                                  "raymap",  "sample",    "eval"};
  for (const auto& stage : stages)
    if (!known_stages.count(stage))
      throw std::invalid_argument("config: unknown stage '" + stage + "'");
  if (project.views_count < 3 || project.views_count > 12)
    throw std::invalid_argument("config: project.views_count outside [3, 12]");
  if (project.overlap_ratio < 0.0 || project.overlap_ratio > 2.0 / 3.0)
    throw std::invalid_argument("config: project.overlap_ratio outside [0, 2/3]");
  if (!(project.hfov_deg > 0.0 && project.hfov_deg < 180.0))
    throw std::invalid_argument("config: project.hfov_deg outside (0, 180)");
  if (keyframes.mode != "neighbor" && keyframes.mode != "walkin")
    throw std::invalid_argument("config: keyframes.mode must be neighbor or walkin");
  if (keyframes.walk_ratio < 0.0 || keyframes.walk_ratio >= 1.0)
    throw std::invalid_argument("config: keyframes.walk_ratio outside [0, 1)");
  if (!(keyframes.hfov_deg > 0.0 && keyframes.hfov_deg < 180.0))
    throw std::invalid_argument("config: keyframes.hfov_deg outside (0, 180)");
  if (trajectory.mode != "interpolate" && trajectory.mode != "star" && trajectory.mode != "upsample")
    throw std::invalid_argument("config: trajectory.mode unknown");
  if (trajectory.frames_count < 2)
    throw std::invalid_argument("config: trajectory.frames_count must be >= 2");
  if (sample.steps_count < 1) throw std::invalid_argument("config: sample.steps_count must be >= 1");
  if (!(sample.beta_min > 0.0 && sample.beta_min <= sample.beta_max && sample.beta_max < 1.0))
    throw std::invalid_argument("config: sample betas must satisfy 0 < min <= max < 1");
  if (!(sample.tau_t_m > 0.0) || !(sample.tau_q_rad > 0.0))
    throw std::invalid_argument("config: sample temperatures must be positive");
  if (sample.weight_mode != "literal" && sample.weight_mode != "blend")
    throw std::invalid_argument("config: sample.weight_mode must be literal or blend");
  if (raymap.size_px < 1) throw std::invalid_argument("config: raymap.size_px must be >= 1");
}

std::string serialize_config(const PipelineConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["stages"] = c.stages;
  j["output_dir"] = c.output_dir;
  j["scene"] = {{"source", c.scene.source},
                {"depth_path", c.scene.depth_path},
                {"pano_width_px", c.scene.pano_width_px},
                {"room_radius_m", c.scene.room_radius_m},
                {"max_depth_m", c.scene.max_depth_m}};
  j["project"] = {{"views_count", c.project.views_count},
                  {"overlap_ratio", c.project.overlap_ratio},
                  {"hfov_deg", c.project.hfov_deg},
                  {"out_size_px", c.project.out_size_px}};
  j["keyframes"] = {{"mode", c.keyframes.mode},
                    {"views_count", c.keyframes.views_count},
                    {"overlap_ratio", c.keyframes.overlap_ratio},
                    {"hfov_deg", c.keyframes.hfov_deg},
                    {"walk_ratio", c.keyframes.walk_ratio},
                    {"out_size_px", c.keyframes.out_size_px}};
  j["trajectory"] = {{"mode", c.trajectory.mode},
                     {"frames_count", c.trajectory.frames_count},
                     {"max_rot_step_deg", c.trajectory.max_rot_step_deg},
                     {"max_trans_step_m", c.trajectory.max_trans_step_m},
                     {"directions_count", c.trajectory.directions_count},
                     {"safety_margin_m", c.trajectory.safety_margin_m},
                     {"frame_rate_fps", c.trajectory.frame_rate_fps}};
  j["raymap"] = {{"size_px", c.raymap.size_px}};
  j["sample"] = {{"steps_count", c.sample.steps_count},
                 {"beta_min", c.sample.beta_min},
                 {"beta_max", c.sample.beta_max},
                 {"tau_t_m", c.sample.tau_t_m},
                 {"tau_q_rad", c.sample.tau_q_rad},
                 {"denoiser", c.sample.denoiser},
                 {"weight_mode", c.sample.weight_mode},
                 {"stochastic", c.sample.stochastic},
                 {"cycle_interval_count", c.sample.cycle_interval_count}};
  j["eval"] = {{"metrics", c.eval.metrics},
               {"generated_dir", c.eval.generated_dir},
               {"reference_dir", c.eval.reference_dir}};
  return j.dump(2) + "\n";
}

PipelineConfig parse_config(const std::string& json_text) {
  const json j = json::parse(json_text);
  reject_unknown(j, {"seed", "stages", "output_dir", "scene", "project", "keyframes", "trajectory",
                     "raymap", "sample", "eval"},
                 "");

  PipelineConfig c;
  c.seed = j.value("seed", c.seed);
  if (j.contains("stages")) c.stages = j.at("stages").get<std::vector<std::string>>();
  c.output_dir = j.value("output_dir", c.output_dir);

  if (j.contains("scene")) {
    const json& s = j.at("scene");
    reject_unknown(s, {"source", "depth_path", "pano_width_px", "room_radius_m", "max_depth_m"},
                   "scene.");
    c.scene.source = s.value("source", c.scene.source);
    c.scene.depth_path = s.value("depth_path", c.scene.depth_path);
    c.scene.pano_width_px = s.value("pano_width_px", c.scene.pano_width_px);
    c.scene.room_radius_m = s.value("room_radius_m", c.scene.room_radius_m);
    c.scene.max_depth_m = s.value("max_depth_m", c.scene.max_depth_m);
  }
  if (j.contains("project")) {
    const json& s = j.at("project");
    reject_unknown(s, {"views_count", "overlap_ratio", "hfov_deg", "out_size_px"}, "project.");
    c.project.views_count = s.value("views_count", c.project.views_count);
    c.project.overlap_ratio = s.value("overlap_ratio", c.project.overlap_ratio);
    c.project.hfov_deg = s.value("hfov_deg", c.project.hfov_deg);
    c.project.out_size_px = s.value("out_size_px", c.project.out_size_px);
  }
  if (j.contains("keyframes")) {
    const json& s = j.at("keyframes");
    reject_unknown(
        s, {"mode", "views_count", "overlap_ratio", "hfov_deg", "walk_ratio", "out_size_px"},
        "keyframes.");
    c.keyframes.mode = s.value("mode", c.keyframes.mode);
    c.keyframes.views_count = s.value("views_count", c.keyframes.views_count);
    c.keyframes.overlap_ratio = s.value("overlap_ratio", c.keyframes.overlap_ratio);
    c.keyframes.hfov_deg = s.value("hfov_deg", c.keyframes.hfov_deg);
    c.keyframes.walk_ratio = s.value("walk_ratio", c.keyframes.walk_ratio);
    c.keyframes.out_size_px = s.value("out_size_px", c.keyframes.out_size_px);
  }
  if (j.contains("trajectory")) {
    const json& s = j.at("trajectory");
    reject_unknown(s,
                   {"mode", "frames_count", "max_rot_step_deg", "max_trans_step_m",
                    "directions_count", "safety_margin_m", "frame_rate_fps"},
                   "trajectory.");
    c.trajectory.mode = s.value("mode", c.trajectory.mode);
    c.trajectory.frames_count = s.value("frames_count", c.trajectory.frames_count);
    c.trajectory.max_rot_step_deg = s.value("max_rot_step_deg", c.trajectory.max_rot_step_deg);
    c.trajectory.max_trans_step_m = s.value("max_trans_step_m", c.trajectory.max_trans_step_m);
    c.trajectory.directions_count = s.value("directions_count", c.trajectory.directions_count);
    c.trajectory.safety_margin_m = s.value("safety_margin_m", c.trajectory.safety_margin_m);
    c.trajectory.frame_rate_fps = s.value("frame_rate_fps", c.trajectory.frame_rate_fps);
  }
  if (j.contains("raymap")) {
    const json& s = j.at("raymap");
    reject_unknown(s, {"size_px"}, "raymap.");
    c.raymap.size_px = s.value("size_px", c.raymap.size_px);
  }
  if (j.contains("sample")) {
    const json& s = j.at("sample");
    reject_unknown(s,
                   {"steps_count", "beta_min", "beta_max", "tau_t_m", "tau_q_rad", "denoiser",
                    "weight_mode", "stochastic", "cycle_interval_count"},
                   "sample.");
    c.sample.steps_count = s.value("steps_count", c.sample.steps_count);
    c.sample.beta_min = s.value("beta_min", c.sample.beta_min);
    c.sample.beta_max = s.value("beta_max", c.sample.beta_max);
    c.sample.tau_t_m = s.value("tau_t_m", c.sample.tau_t_m);
    c.sample.tau_q_rad = s.value("tau_q_rad", c.sample.tau_q_rad);
    c.sample.denoiser = s.value("denoiser", c.sample.denoiser);
    c.sample.weight_mode = s.value("weight_mode", c.sample.weight_mode);
    c.sample.stochastic = s.value("stochastic", c.sample.stochastic);
    c.sample.cycle_interval_count = s.value("cycle_interval_count", c.sample.cycle_interval_count);
  }
  if (j.contains("eval")) {
    const json& s = j.at("eval");
    reject_unknown(s, {"metrics", "generated_dir", "reference_dir"}, "eval.");
    if (s.contains("metrics")) c.eval.metrics = s.at("metrics").get<std::vector<std::string>>();
    c.eval.generated_dir = s.value("generated_dir", c.eval.generated_dir);
    c.eval.reference_dir = s.value("reference_dir", c.eval.reference_dir);
  }
  c.validate();
  return c;
}

PipelineConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text);
}

void write_config_file(const std::string& path, const PipelineConfig& config) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << serialize_config(config);
}

bool operator==(const PipelineConfig& a, const PipelineConfig& b) {
  return serialize_config(a) == serialize_config(b);
}

}  // namespace pvs
