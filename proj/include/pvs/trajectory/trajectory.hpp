#pragma once

#include "pvs/core/types.hpp"

#include <optional>
#include <vector>

namespace pvs {

struct TimedPose {
  double timestamp = 0.0;  // seconds
  CameraPose pose;
};

struct TrajectorySpec {
  std::vector<TimedPose> keyposes;  // timestamps strictly increasing
  double frame_rate = 12.0;
  bool loop_closed = false;

  void validate() const;
};

/// Spherical linear interpolation along the shorter arc. If the endpoint dot
/// product is negative, q_b is flipped before interpolating; angles below
/// 1e-6 fall through to normalized linear interpolation.
Quat slerp(const Quat& q_a, const Quat& q_b, double lambda);

/// Linear pose interpolation: normalized quaternion LERP plus linear
/// translation. Only valid away from antipodal orientations
/// (|q_a . q_b| >= 0.05); intended for small rotations, a warning string is
/// appended to `warnings` above 5 degrees of quaternion separation.
CameraPose lerp_pose(const CameraPose& pose_a, const CameraPose& pose_b, double lambda,
                     std::vector<std::string>* warnings = nullptr);

/// Inserts interpolated poses until every adjacent pair satisfies both step
/// bounds (rotation angle and translation distance). Original keyposes are
/// preserved verbatim; timestamps of inserted poses are linear in lambda.
/// Idempotent.
TrajectorySpec upsample_trajectory(const TrajectorySpec& spec, double max_rot_step,
                                   double max_trans_step);

struct StarOptions {
  double frustum_hfov = kPi / 3.0;  // fan used for the average-depth probe test
  int fan_rays = 9;
  int steps_out = 4;    // waypoints per outbound leg
  int scan_steps = 8;   // in-place scan rotation at the far point
  int turn_steps = 2;   // connecting rotation between directions
  double turn_arc_radius = 0.0;  // > 0 replaces in-place turns with circular arcs
  double frame_rate = 12.0;
};

/// Star-shaped exploration of a panorama-described room: for every probe
/// direction whose average frustum depth reaches the nearest corner-point
/// distance (corner points sampled at pi/4 intervals), walks straight out to
/// the depth boundary minus safety_margin, scans, walks back and rotates to
/// the next direction. Rooms too tight for any probe degrade to an in-place
/// rotation.
TrajectorySpec generate_star_trajectory(const DepthMap& depth_pano, const Vec3& center,
                                        int n_directions, double safety_margin,
                                        const StarOptions& options = {});

/// World-to-camera pose of a camera at `position` looking along the
/// horizontal direction `forward` (z up).
CameraPose look_pose(const Vec3& position, const Vec3& forward);

/// Boundary distance of an equirectangular depth map along a horizontal
/// direction (bilinear in longitude at the equator row).
double pano_depth_at(const DepthMap& depth_pano, double lon);

}  // namespace pvs
