#include "pvs/trajectory/trajectory.hpp"

#include "pvs/io/synthetic.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace pvs;

namespace {

double quat_geodesic(const Quat& a, const Quat& b) {
  return std::acos(std::min(1.0, std::abs(a.dot(b))));
}

}  // namespace

TEST_CASE("slerp endpoints and identical inputs") {
  const CounterRng rng{51};
  const Quat q = test::random_quat(rng, 0);
  for (double lambda : {0.0, 0.25, 0.5, 0.75, 1.0})
    CHECK(approx_equal(slerp(q, q, lambda), q, 1e-12));

  const Quat a = test::random_quat(rng, 1);
  const Quat b = test::random_quat(rng, 2);
  CHECK(quat_geodesic(slerp(a, b, 0.0), a) <= 1e-9);
  CHECK(quat_geodesic(slerp(a, b, 1.0), b) <= 1e-9);
}

TEST_CASE("slerp half way between identity and a 90-degree turn") {
  // Closed form: half of a 90-degree rotation about z is 45 degrees about z.
  const Quat a = Quat::identity();
  const Quat b = Quat::from_axis_angle(Vec3(0, 0, 1), kPi / 2.0);
  const Quat mid = slerp(a, b, 0.5);
  const Quat expected = Quat::from_axis_angle(Vec3(0, 0, 1), kPi / 4.0);
  CHECK(approx_equal(mid.canonical(), expected.canonical(), 1e-12));
}

TEST_CASE("slerp geodesic distance is linear in lambda") {
  const CounterRng rng{52};
  for (int i = 0; i < 100; ++i) {
    const Quat a = test::random_quat(rng, 2 * i);
    Quat b = test::random_quat(rng, 2 * i + 1);
    double cos_theta = a.dot(b);
    if (cos_theta < 0.0) {
      b = b.negated();
      cos_theta = -cos_theta;
    }
    const double theta = std::acos(std::min(1.0, cos_theta));
    for (int k = 0; k <= 100; k += 10) {
      const double lambda = k / 100.0;
      const Quat s = slerp(a, b, lambda);
      CHECK(std::abs(s.norm() - 1.0) <= 1e-9);
      CHECK(std::abs(quat_geodesic(a, s) - lambda * theta) <= 1e-7);
    }
  }
}

TEST_CASE("slerp takes the short arc for antipodal representations") {
  const CounterRng rng{53};
  for (int i = 0; i < 50; ++i) {
    const Quat a = test::random_quat(rng, i);
    const Quat r = Quat::from_axis_angle(test::random_vec3(rng, i + 200).normalized(), 0.2);
    const Quat b = (a * r).negated();  // same rotation family, flipped sign
    const double canonical_angle = quat_geodesic(a, b);
    for (double lambda : {0.25, 0.5, 0.75}) {
      const double gd = quat_geodesic(a, slerp(a, b, lambda));
      CHECK(gd <= canonical_angle + 1e-9);
    }
  }
}

TEST_CASE("lerp_pose endpoints, translation midpointing and cutoffs") {
  const CameraPose a(Quat::identity(), Vec3(0, 0, 0));
  const CameraPose b(Quat::from_axis_angle(Vec3(0, 0, 1), deg_to_rad(4.0)), Vec3(2, 0, 0));

  const CameraPose at0 = lerp_pose(a, b, 0.0);
  CHECK(approx_equal(at0.rotation, a.rotation, 1e-15));
  CHECK(at0.translation == a.translation);

  CHECK(lerp_pose(a, b, 0.25).translation.isApprox(Vec3(0.5, 0, 0), 1e-15));

  // Near-antipodal pairs are rejected.
  const Quat near_orthogonal = Quat::from_axis_angle(Vec3(1, 0, 0), kPi * 0.98);
  CHECK_THROWS_AS(lerp_pose(a, CameraPose(near_orthogonal, Vec3::Zero()), 0.5),
                  std::invalid_argument);

  // A warning recommends slerp above 5 degrees of quaternion separation.
  std::vector<std::string> warnings;
  lerp_pose(a, CameraPose(Quat::from_axis_angle(Vec3(0, 0, 1), deg_to_rad(30.0)), Vec3::Zero()),
            0.5, &warnings);
  CHECK(warnings.size() == 1);
}

TEST_CASE("lerp tracks slerp closely at 5 degrees of separation") {
  // Quaternion angle of 5 degrees corresponds to a 10-degree rotation.
  const Quat a = Quat::identity();
  const Quat b = Quat::from_axis_angle(Vec3(0.3, -0.5, 0.8).normalized(), deg_to_rad(10.0));
  CHECK(rad_to_deg(quat_geodesic(a, b)) == doctest::Approx(5.0).epsilon(1e-9));

  const CameraPose pa(a, Vec3::Zero()), pb(b, Vec3::Zero());
  double worst = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double lambda = k / 100.0;
    const Quat lerped = lerp_pose(pa, pb, lambda).rotation;
    const Quat slerped = slerp(a, b, lambda);
    worst = std::max(worst, quat_geodesic(lerped, slerped));
  }
  CHECK(rad_to_deg(worst) < 0.01);
}

TEST_CASE("upsample_trajectory inserts poses to satisfy both bounds") {
  TrajectorySpec spec;
  spec.keyposes.push_back({0.0, CameraPose(Quat::identity(), Vec3::Zero())});
  spec.keyposes.push_back(
      {1.0, CameraPose(Quat::from_axis_angle(Vec3(0, 0, 1), kPi / 2.0), Vec3::Zero())});

  SUBCASE("already satisfying bounds: returned unchanged") {
    const TrajectorySpec out = upsample_trajectory(spec, kPi, 10.0);
    REQUIRE(out.keyposes.size() == 2);
    CHECK(approx_equal(out.keyposes[0].pose.rotation, spec.keyposes[0].pose.rotation, 0.0));
    CHECK(approx_equal(out.keyposes[1].pose.rotation, spec.keyposes[1].pose.rotation, 0.0));
  }

  SUBCASE("90 degrees with a 30-degree bound inserts poses at 30 and 60") {
    const TrajectorySpec out = upsample_trajectory(spec, deg_to_rad(30.0), 10.0);
    REQUIRE(out.keyposes.size() == 4);
    const Quat expected30 = Quat::from_axis_angle(Vec3(0, 0, 1), deg_to_rad(30.0));
    const Quat expected60 = Quat::from_axis_angle(Vec3(0, 0, 1), deg_to_rad(60.0));
    CHECK(quat_geodesic(out.keyposes[1].pose.rotation, expected30) <= 1e-9);
    CHECK(quat_geodesic(out.keyposes[2].pose.rotation, expected60) <= 1e-9);
    CHECK(out.keyposes[1].timestamp == doctest::Approx(1.0 / 3.0));
  }

  SUBCASE("translation bound dominates: 5 insertions") {
    spec.keyposes[1].pose =
        CameraPose(spec.keyposes[1].pose.rotation, Vec3(3.0, 0.0, 0.0));
    const TrajectorySpec out = upsample_trajectory(spec, deg_to_rad(30.0), 0.5);
    CHECK(out.keyposes.size() == 7);  // 6 segments
  }

  SUBCASE("endpoints preserved bit-exactly and idempotent") {
    const TrajectorySpec once = upsample_trajectory(spec, deg_to_rad(30.0), 10.0);
    CHECK(once.keyposes.front().pose.rotation.w == spec.keyposes.front().pose.rotation.w);
    CHECK(once.keyposes.back().pose.rotation.z == spec.keyposes.back().pose.rotation.z);
    const TrajectorySpec twice = upsample_trajectory(once, deg_to_rad(30.0), 10.0);
    REQUIRE(twice.keyposes.size() == once.keyposes.size());
    for (size_t i = 0; i < once.keyposes.size(); ++i)
      CHECK(approx_equal(twice.keyposes[i].pose.rotation, once.keyposes[i].pose.rotation, 0.0));
  }

  SUBCASE("non-positive bounds rejected") {
    CHECK_THROWS_AS(upsample_trajectory(spec, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(upsample_trajectory(spec, 1.0, -1.0), std::invalid_argument);
  }
}

TEST_CASE("star trajectory in a circular room accepts every probe") {
  const double radius = 5.0;
  const DepthMap depth = circular_room_depth(128, 64, radius, 20.0);
  const double margin = 0.2 * radius;
  const TrajectorySpec spec = generate_star_trajectory(depth, Vec3::Zero(), 8, margin);
  spec.validate();
  CHECK(spec.loop_closed);
  REQUIRE(spec.keyposes.size() > 8);

  double max_radial = 0.0;
  for (const auto& kp : spec.keyposes) max_radial = std::max(max_radial, kp.pose.center().norm());
  CHECK(max_radial <= 0.8 * radius + 1e-9);
  CHECK(max_radial > 0.7 * radius);  // probes actually walk out

  // Never closer than the margin to the boundary.
  for (const auto& kp : spec.keyposes)
    CHECK(radius - kp.pose.center().norm() >= margin - 1e-9);
}

TEST_CASE("square room: corner probes see sqrt(2) times the face depth") {
  const DepthMap depth = square_room_depth(1024, 512, 3.0, 20.0);
  const double face = pano_depth_at(depth, 0.0);
  const double corner = pano_depth_at(depth, kPi / 4.0);
  CHECK(corner / face == doctest::Approx(std::sqrt(2.0)).epsilon(5e-3));
}

TEST_CASE("degenerate room: all walls at the margin collapse to in-place rotation") {
  const double radius = 1.0;
  const DepthMap depth = circular_room_depth(64, 32, radius, 20.0);
  const TrajectorySpec spec = generate_star_trajectory(depth, Vec3::Zero(), 6, radius);
  CHECK(spec.keyposes.size() >= 4);
  for (const auto& kp : spec.keyposes) {
    CHECK(kp.pose.center().norm() <= 1e-12);
    CHECK(kp.pose.translation.norm() <= 1e-12);
  }
}

TEST_CASE("curved turns keep the margin") {
  const double radius = 4.0;
  const DepthMap depth = circular_room_depth(128, 64, radius, 20.0);
  StarOptions options;
  options.turn_arc_radius = 1.0;
  const TrajectorySpec spec = generate_star_trajectory(depth, Vec3::Zero(), 4, 0.5, options);
  for (const auto& kp : spec.keyposes)
    CHECK(radius - kp.pose.center().norm() >= 0.5 - 1e-9);
}

TEST_CASE("trajectory spec validation") {
  TrajectorySpec spec;
  spec.keyposes.push_back({0.0, CameraPose()});
  spec.keyposes.push_back({0.0, CameraPose()});
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  spec.keyposes[1].timestamp = 1.0;
  CHECK_NOTHROW(spec.validate());

  spec.loop_closed = true;
  spec.keyposes[1].pose = CameraPose(Quat::identity(), Vec3(1, 0, 0));
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}
