#include "pvs/trajectory/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pvs {

void TrajectorySpec::validate() const {
  for (size_t i = 1; i < keyposes.size(); ++i)
    if (!(keyposes[i].timestamp > keyposes[i - 1].timestamp))
      throw std::invalid_argument("TrajectorySpec: timestamps must be strictly increasing");
  if (loop_closed && keyposes.size() >= 2) {
    const auto& a = keyposes.front().pose;
    const auto& b = keyposes.back().pose;
    const bool same_rot = approx_equal(a.rotation.canonical(), b.rotation.canonical(), 1e-6);
    if (!same_rot || (a.translation - b.translation).norm() > 1e-6)
      throw std::invalid_argument("TrajectorySpec: loop_closed but endpoints differ");
  }
  if (!(frame_rate > 0.0)) throw std::invalid_argument("TrajectorySpec: frame_rate must be positive");
}

Quat slerp(const Quat& q_a, const Quat& q_b, double lambda) {
  if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("slerp: lambda outside [0, 1]");

  Quat b = q_b;
  double cos_theta = q_a.dot(q_b);
  if (cos_theta < 0.0) {  // take the shorter arc
    b = b.negated();
    cos_theta = -cos_theta;
  }
  cos_theta = std::min(1.0, cos_theta);
  const double theta = std::acos(cos_theta);

  if (theta < 1e-6) {
    const Quat lin{(1.0 - lambda) * q_a.w + lambda * b.w, (1.0 - lambda) * q_a.x + lambda * b.x,
                   (1.0 - lambda) * q_a.y + lambda * b.y, (1.0 - lambda) * q_a.z + lambda * b.z};
    return lin.normalized();
  }

  const double s = std::sin(theta);
  const double wa = std::sin((1.0 - lambda) * theta) / s;
  const double wb = std::sin(lambda * theta) / s;
  const Quat out{wa * q_a.w + wb * b.w, wa * q_a.x + wb * b.x, wa * q_a.y + wb * b.y,
                 wa * q_a.z + wb * b.z};
  return out.normalized();
}

CameraPose lerp_pose(const CameraPose& pose_a, const CameraPose& pose_b, double lambda,
                     std::vector<std::string>* warnings) {
  if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("lerp_pose: lambda outside [0, 1]");

  const double d = pose_a.rotation.dot(pose_b.rotation);
  if (std::abs(d) < 0.05)
    throw std::invalid_argument("lerp_pose: near-antipodal quaternions, use slerp");
  if (warnings && std::acos(std::min(1.0, std::abs(d))) > deg_to_rad(5.0)) {
    std::ostringstream os;
    os << "lerp_pose: quaternion separation " << rad_to_deg(std::acos(std::min(1.0, std::abs(d))))
       << " deg exceeds 5 deg, slerp recommended";
    warnings->push_back(os.str());
  }

  Quat b = pose_b.rotation;
  if (d < 0.0) b = b.negated();
  const Quat lin{(1.0 - lambda) * pose_a.rotation.w + lambda * b.w,
                 (1.0 - lambda) * pose_a.rotation.x + lambda * b.x,
                 (1.0 - lambda) * pose_a.rotation.y + lambda * b.y,
                 (1.0 - lambda) * pose_a.rotation.z + lambda * b.z};
  const Vec3 t = (1.0 - lambda) * pose_a.translation + lambda * pose_b.translation;
  return CameraPose(lin.normalized(), t);
}

TrajectorySpec upsample_trajectory(const TrajectorySpec& spec, double max_rot_step,
                                   double max_trans_step) {
  if (!(max_rot_step > 0.0) || !(max_trans_step > 0.0))
    throw std::invalid_argument("upsample_trajectory: step bounds must be positive");
  spec.validate();

  TrajectorySpec out;
  out.frame_rate = spec.frame_rate;
  out.loop_closed = spec.loop_closed;
  if (spec.keyposes.empty()) return out;

  out.keyposes.push_back(spec.keyposes.front());
  for (size_t i = 1; i < spec.keyposes.size(); ++i) {
    const TimedPose& a = spec.keyposes[i - 1];
    const TimedPose& b = spec.keyposes[i];
    const double rot = a.pose.rotation.rotation_angle(b.pose.rotation);
    const double trans = (b.pose.translation - a.pose.translation).norm();
    const int n = std::max({1, int(std::ceil(rot / max_rot_step - 1e-9)),
                            int(std::ceil(trans / max_trans_step - 1e-9))});
    for (int k = 1; k < n; ++k) {
      const double lambda = double(k) / n;
      TimedPose inserted;
      inserted.timestamp = a.timestamp + lambda * (b.timestamp - a.timestamp);
      inserted.pose = CameraPose(slerp(a.pose.rotation, b.pose.rotation, lambda),
                                 (1.0 - lambda) * a.pose.translation + lambda * b.pose.translation);
      out.keyposes.push_back(inserted);
    }
    out.keyposes.push_back(b);
  }
  return out;
}

CameraPose look_pose(const Vec3& position, const Vec3& forward) {
  const Vec3 f = forward.normalized();
  const Vec3 down(0.0, 0.0, -1.0);
  const Vec3 right = down.cross(f).normalized();
  const Vec3 d = f.cross(right);  // re-orthogonalized down
  Mat3 cam_to_world;
  cam_to_world.col(0) = right;
  cam_to_world.col(1) = d;
  cam_to_world.col(2) = f;
  const Quat q = Quat::from_matrix(cam_to_world.transpose());
  return CameraPose(q, -(cam_to_world.transpose() * position));
}

double pano_depth_at(const DepthMap& depth_pano, double lon) {
  const double u = (wrap_angle(lon) / (2.0 * kPi) + 0.5) * depth_pano.width - 0.5;
  const int x0 = int(std::floor(u));
  const double f = u - x0;
  const int y = depth_pano.height / 2;  // equator row
  auto wrap = [&](int x) {
    x %= depth_pano.width;
    return x < 0 ? x + depth_pano.width : x;
  };
  return (1.0 - f) * depth_pano.at(wrap(x0), y) + f * depth_pano.at(wrap(x0 + 1), y);
}

namespace {

Vec3 horizontal_dir(double lon) { return {std::cos(lon), std::sin(lon), 0.0}; }

}  // namespace

TrajectorySpec generate_star_trajectory(const DepthMap& depth_pano, const Vec3& center,
                                        int n_directions, double safety_margin,
                                        const StarOptions& options) {
  if (n_directions < 3) throw std::invalid_argument("generate_star_trajectory: need >= 3 directions");
  if (safety_margin < 0.0) throw std::invalid_argument("generate_star_trajectory: negative margin");
  depth_pano.validate();

  // Corner points at pi/4 intervals define the room structure; the nearest
  // one gates probe acceptance.
  double nearest_corner = std::numeric_limits<double>::max();
  for (int i = 0; i < 8; ++i)
    nearest_corner = std::min(nearest_corner, pano_depth_at(depth_pano, i * kPi / 4.0));
  double room_min = std::numeric_limits<double>::max();
  for (int i = 0; i < 64; ++i)
    room_min = std::min(room_min, pano_depth_at(depth_pano, i * kPi / 32.0));

  struct Probe {
    double lon;
    double extent;
  };
  std::vector<Probe> accepted;
  for (int k = 0; k < n_directions; ++k) {
    const double lon = 2.0 * kPi * k / n_directions;
    double fan_sum = 0.0;
    for (int r = 0; r < options.fan_rays; ++r) {
      const double offset =
          options.fan_rays > 1
              ? (-0.5 + double(r) / (options.fan_rays - 1)) * options.frustum_hfov
              : 0.0;
      fan_sum += pano_depth_at(depth_pano, lon + offset);
    }
    const double fan_avg = fan_sum / options.fan_rays;
    const double extent = pano_depth_at(depth_pano, lon) - safety_margin;
    if (fan_avg >= nearest_corner - 1e-12 && extent > 1e-9) accepted.push_back({lon, extent});
  }

  TrajectorySpec spec;
  spec.frame_rate = options.frame_rate;
  const double dt = 1.0 / options.frame_rate;
  double t = 0.0;
  auto push = [&](const CameraPose& pose) {
    spec.keyposes.push_back({t, pose});
    t += dt;
  };

  if (accepted.empty()) {
    // Degenerate room: rotate in place.
    const int steps = std::max(options.scan_steps, 4);
    for (int i = 0; i <= steps; ++i)
      push(look_pose(center, horizontal_dir(2.0 * kPi * i / steps)));
    spec.loop_closed = true;
    spec.validate();
    return spec;
  }

  const double first_lon = accepted.front().lon;
  for (size_t p = 0; p < accepted.size(); ++p) {
    const Probe& probe = accepted[p];
    const Vec3 dir = horizontal_dir(probe.lon);

    // Out.
    for (int i = 0; i <= options.steps_out; ++i)
      push(look_pose(center + (probe.extent * i / options.steps_out) * dir, dir));
    // Scan rotation at the far point.
    const Vec3 far_point = center + probe.extent * dir;
    for (int i = 1; i <= options.scan_steps; ++i)
      push(look_pose(far_point, horizontal_dir(probe.lon + 2.0 * kPi * i / options.scan_steps)));
    // Return, facing the center.
    for (int i = options.steps_out - 1; i >= 0; --i)
      push(look_pose(center + (probe.extent * i / options.steps_out) * dir, -dir));

    // Connecting rotation (or arc) toward the next probe direction.
    const double next_lon = accepted[(p + 1) % accepted.size()].lon;
    double delta = next_lon - (probe.lon + kPi);  // currently facing -dir
    while (delta <= -kPi) delta += 2.0 * kPi;
    while (delta > kPi) delta -= 2.0 * kPi;
    if (options.turn_arc_radius > 0.0 && options.turn_arc_radius < room_min - safety_margin) {
      // Curved turn: a lateral arc excursion that starts and ends at the
      // center while the heading sweeps toward the next direction.
      for (int i = 1; i <= options.turn_steps; ++i) {
        const double u = double(i) / options.turn_steps;
        const double heading = probe.lon + kPi + delta * u;
        const Vec3 offset =
            options.turn_arc_radius * std::sin(kPi * u) * horizontal_dir(heading + kPi / 2.0);
        push(look_pose(center + offset, horizontal_dir(heading)));
      }
    } else {
      for (int i = 1; i <= options.turn_steps; ++i)
        push(look_pose(center, horizontal_dir(probe.lon + kPi + delta * i / options.turn_steps)));
    }
  }

  // Close the loop at the first probe heading.
  const CameraPose start = look_pose(center, horizontal_dir(first_lon));
  const auto& last = spec.keyposes.back().pose;
  if ((last.translation - start.translation).norm() > 1e-9 ||
      !approx_equal(last.rotation.canonical(), start.rotation.canonical(), 1e-9))
    push(start);
  spec.loop_closed = true;
  spec.validate();
  return spec;
}

}  // namespace pvs
