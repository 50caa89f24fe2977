#include "pvs/core/pose_io.hpp"

#include <json.hpp>

#include <fstream>

namespace pvs {

namespace {

nlohmann::json record_to_json(const PoseRecord& record) {
  const auto& q = record.pose.rotation;
  const auto& t = record.pose.translation;
  const auto& k = record.intrinsics;
  return nlohmann::json{
      {"q", {q.w, q.x, q.y, q.z}},
      {"t", {t.x(), t.y(), t.z()}},
      {"intrinsics",
       {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"w", k.width}, {"h", k.height}}}};
}

PoseRecord record_from_json(const nlohmann::json& j) {
  PoseRecord record;
  const auto& q = j.at("q");
  const auto& t = j.at("t");
  record.pose = CameraPose(Quat(q.at(0), q.at(1), q.at(2), q.at(3)),
                           Vec3(t.at(0), t.at(1), t.at(2)));
  const auto& k = j.at("intrinsics");
  record.intrinsics = {k.at("fx"), k.at("fy"), k.at("cx"),
                       k.at("cy"), k.at("w"),  k.at("h")};
  return record;
}

}  // namespace

std::string pose_json_string(const std::vector<PoseRecord>& records) {
  nlohmann::json array = nlohmann::json::array();
  for (const auto& record : records) array.push_back(record_to_json(record));
  return array.dump(2) + "\n";
}

std::vector<PoseRecord> parse_pose_json(const std::string& text) {
  const nlohmann::json array = nlohmann::json::parse(text);
  std::vector<PoseRecord> records;
  records.reserve(array.size());
  for (const auto& j : array) records.push_back(record_from_json(j));
  return records;
}

std::vector<PoseRecord> read_pose_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_pose_json(text);
}

void write_pose_json(const std::string& path, const std::vector<PoseRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << pose_json_string(records);
}

}  // namespace pvs
