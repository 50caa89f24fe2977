#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pvs {

/// FNV-1a 64-bit content hash, hex-encoded.
uint64_t fnv1a64(const void* data, size_t size);
std::string hash_bytes(const std::string& bytes);
std::string hash_file(const std::string& path);

struct ManifestEntry {
  std::string path;
  std::string hash;
};

struct ManifestStage {
  std::string name;
  std::vector<ManifestEntry> outputs;
  double wall_ms = 0.0;
};

/// Run provenance: config and input hashes plus per-stage output listings.
/// Output hashes are deterministic across reruns with the same config and
/// seed; wall-clock timings are recorded but excluded from any hashing.
struct RunManifest {
  std::string tool_version;
  std::string config_hash;
  uint64_t seed = 0;
  std::string base_dir;  // entries are stored relative to this; not serialized
  std::vector<ManifestEntry> inputs;
  std::vector<ManifestStage> stages;

  void add_output(const std::string& stage, const std::string& path);
  void set_stage_time(const std::string& stage, double wall_ms);

  std::string to_json() const;
  void write(const std::string& path) const;

  /// Re-hashes every listed output; returns the paths that no longer match.
  std::vector<std::string> verify() const;
};

}  // namespace pvs
