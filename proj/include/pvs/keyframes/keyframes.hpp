#pragma once

#include "pvs/core/types.hpp"
#include "pvs/projection/projection.hpp"

#include <vector>

namespace pvs {

enum class PairRelation { neighboring, walk_in };

/// Source/target keyframe pair for video interpolation. The target inpaint
/// mask is true where content is unknown and must be synthesized; masks and
/// images share dimensions. Neighboring pairs are pure rotations about the
/// panorama center, so both poses carry equal (zero) translation.
struct KeyframePair {
  PerspectiveImage source_image;
  CameraPose source_pose;
  PerspectiveImage target_image;
  CameraPose target_pose;
  std::vector<uint8_t> target_inpaint_mask;
  PairRelation relation = PairRelation::neighboring;
  CameraIntrinsics intrinsics;

  size_t inpaint_area() const {
    size_t n = 0;
    for (uint8_t v : target_inpaint_mask) n += v != 0;
    return n;
  }
};

/// Dense source-to-target correspondence produced by a forward warp.
/// target_coords stores the continuous target coordinates (2 per source
/// pixel), NaN where the source pixel leaves the target frustum; occupancy
/// lives on the target grid.
struct WarpField {
  int source_width = 0, source_height = 0;
  int target_width = 0, target_height = 0;
  std::vector<double> target_coords;
  std::vector<uint8_t> occupancy;

  bool has_coord(int x, int y) const {
    return std::isfinite(target_coords[(size_t(y) * source_width + x) * 2]);
  }
  double coord_x(int x, int y) const { return target_coords[(size_t(y) * source_width + x) * 2]; }
  double coord_y(int x, int y) const {
    return target_coords[(size_t(y) * source_width + x) * 2 + 1];
  }
};

/// Pinhole camera equivalent of a view window anchored at the world origin:
/// fx = (W/2) / tan(hfov/2), fy = (H/2) / tan(vfov/2), principal point at the
/// image center, optical axis along the window direction.
struct WindowCamera {
  CameraPose pose;
  CameraIntrinsics intrinsics;
};
WindowCamera window_camera(const ViewWindow& window);

/// Walk-in rescale factor s = f / tan((1 - c) * hfov / 2) with
/// c = target_distance / depth_max. c >= 1 is a singular configuration.
double walk_in_scale(double target_distance, double depth_max, double focal, double hfov);

struct ForwardWarpResult {
  PerspectiveImage image;                // warped target view
  WarpField field;
  std::vector<uint8_t> inpaint_mask;     // complement of occupancy
  bool all_outside = false;              // no source pixel reached the target
};

/// Depth-based forward warp: each source pixel is back-projected with its
/// depth, moved through the relative rigid transform and re-projected into
/// the target camera. Collisions resolve by z-buffer (nearest target depth,
/// ties to the lower source row-major index); a single 3x3 closing on the
/// occupancy suppresses one-pixel resampling holes.
ForwardWarpResult forward_warp(const PerspectiveImage& source, const DepthMap& depth,
                               const CameraPose& source_pose, const CameraPose& target_pose,
                               const CameraIntrinsics& intrinsics);

/// Consecutive perspective views at yaw spacing hfov * (1 - overlap_fraction),
/// paired source->target. When the views span the full circle the list closes
/// the loop with a final pair back to the first view.
std::vector<KeyframePair> build_neighboring_pairs(const PanoramaImage& pano, int n_views,
                                                  double overlap_fraction, double hfov);

enum class WalkDepthMode {
  center_pixel,   // depth at the window's central pixel
  central_p10,    // 10th percentile of the central-region depth
};

/// Simulated forward walk along the window's view axis by walk_ratio of the
/// axial scene depth. The target keeps the source's central crop (the region
/// the rescale factor predicts as known) and marks the peripheral border as
/// the inpaint region; warped content fills the border where the forward warp
/// reaches it.
KeyframePair build_walkin_pair(const PanoramaImage& pano, const DepthMap& source_depth,
                               const ViewWindow& window, double walk_ratio,
                               const CameraIntrinsics& intrinsics,
                               WalkDepthMode depth_mode = WalkDepthMode::center_pixel);

}  // namespace pvs
