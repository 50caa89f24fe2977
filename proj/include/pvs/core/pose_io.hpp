#pragma once

#include "pvs/core/types.hpp"

#include <string>
#include <vector>

namespace pvs {

struct PoseRecord {
  CameraPose pose;
  CameraIntrinsics intrinsics;
};

/// Pose files are a JSON array of records
/// {"q": [w,x,y,z], "t": [x,y,z], "intrinsics": {fx,fy,cx,cy,w,h}}.
std::vector<PoseRecord> read_pose_json(const std::string& path);
void write_pose_json(const std::string& path, const std::vector<PoseRecord>& records);

std::string pose_json_string(const std::vector<PoseRecord>& records);
std::vector<PoseRecord> parse_pose_json(const std::string& text);

}  // namespace pvs
