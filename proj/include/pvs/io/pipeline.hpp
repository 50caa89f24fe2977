#pragma once

#include "pvs/io/config.hpp"
#include "pvs/io/manifest.hpp"
#include "pvs/keyframes/keyframes.hpp"
#include "pvs/trajectory/trajectory.hpp"

#include <string>

namespace pvs {

inline constexpr const char* kToolVersion = "panoview 0.1.0";

/// Executes the selected stage subset of
///   project -> keyframes -> trajectory -> raymap -> sample -> eval
/// against the configured scene, writing every artifact under
/// config.output_dir and returning the run manifest. Stages communicate
/// through files plus an in-memory context, so any prefix subset is runnable;
/// later stages rebuild what they need from the scene when an earlier stage
/// was skipped.
RunManifest run_pipeline(const PipelineConfig& config);

/// Renders a perspective view of the spherical demo room (panorama painted on
/// a sphere of the given radius): exact for any interior camera position,
/// reduces to plain panorama sampling at the center.
PerspectiveImage render_scene_view(const PanoramaImage& pano, double room_radius,
                                   const CameraPose& pose, const CameraIntrinsics& intrinsics);

/// Perspective z-depth of a window into a panorama-described room boundary.
DepthMap render_window_depth(const DepthMap& pano_depth, const ViewWindow& window);

/// Reads pair `index` back from a keyframes stage output directory
/// (pairs.json plus the referenced PNGs and pair_poses.json).
KeyframePair load_keyframe_pair(const std::string& dir, int index);

}  // namespace pvs
