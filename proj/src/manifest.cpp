#include "pvs/io/manifest.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace pvs {

uint64_t fnv1a64(const void* data, size_t size) {
  const auto* p = static_cast<const uint8_t*>(data);
  uint64_t h = 0xcbf29ce484222325ull;
  for (size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hash_bytes(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
  return buf;
}

std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open for hashing");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return hash_bytes(bytes);
}

void RunManifest::add_output(const std::string& stage, const std::string& path) {
  const std::string hash = hash_file(path);
  std::string recorded = path;
  if (!base_dir.empty())
    recorded = std::filesystem::relative(path, base_dir).string();
  for (auto& s : stages) {
    if (s.name == stage) {
      s.outputs.push_back({recorded, hash});
      return;
    }
  }
  stages.push_back({stage, {{recorded, hash}}, 0.0});
}

void RunManifest::set_stage_time(const std::string& stage, double wall_ms) {
  for (auto& s : stages) {
    if (s.name == stage) {
      s.wall_ms = wall_ms;
      return;
    }
  }
  stages.push_back({stage, {}, wall_ms});
}

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["tool_version"] = tool_version;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  nlohmann::json in = nlohmann::json::array();
  for (const auto& e : inputs) in.push_back({{"path", e.path}, {"hash", e.hash}});
  j["inputs"] = in;
  nlohmann::json st = nlohmann::json::array();
  for (const auto& s : stages) {
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& e : s.outputs) outs.push_back({{"path", e.path}, {"hash", e.hash}});
    st.push_back({{"name", s.name}, {"outputs", outs}, {"wall_ms", s.wall_ms}});
  }
  j["stages"] = st;
  return j.dump(2) + "\n";
}

void RunManifest::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << to_json();
}

std::vector<std::string> RunManifest::verify() const {
  std::vector<std::string> mismatched;
  for (const auto& s : stages)
    for (const auto& e : s.outputs) {
      const std::string full =
          base_dir.empty() ? e.path : (std::filesystem::path(base_dir) / e.path).string();
      if (hash_file(full) != e.hash) mismatched.push_back(full);
    }
  return mismatched;
}

}  // namespace pvs
