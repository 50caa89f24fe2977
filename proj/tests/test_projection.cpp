#include "pvs/projection/projection.hpp"

#include "pvs/io/synthetic.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace pvs;

namespace {

// Independent transcription of the backprojection chain used as the test
// oracle: pixel -> camera ray -> yaw/pitch rotation -> sphere coordinates.
Vec3 oracle_direction(const ViewWindow& w, int x, int y) {
  const double ry = -(2.0 * (x + 0.5) / w.out_width - 1.0) * std::tan(w.hfov / 2.0);
  const double rz = -(2.0 * (y + 0.5) / w.out_height - 1.0) * std::tan(w.vfov / 2.0);
  const double ct = std::cos(w.yaw), st = std::sin(w.yaw);
  const double cp = std::cos(w.pitch), sp = std::sin(w.pitch);
  const Vec3 d = Vec3(1.0, ry, rz).normalized();
  const Vec3 pitched(cp * d.x() - sp * d.z(), d.y(), sp * d.x() + cp * d.z());
  return {ct * pitched.x() - st * pitched.y(), st * pitched.x() + ct * pitched.y(), pitched.z()};
}

}  // namespace

TEST_CASE("front view sees the panorama center column") {
  PanoramaImage pano(256, 128, 3);
  // Solid red band around the center column (longitude 0).
  for (int y = 0; y < pano.height; ++y)
    for (int x = 126; x <= 130; ++x) pano.at(x, y, 0) = 1.0f;

  const ViewWindow front = ViewWindow::make(0.0, 0.0, kPi / 2.0, kPi / 2.0, 64, 64);
  const ProjectionResult result = pano_to_perspective(pano, front);
  CHECK(result.image.at(32, 32, 0) == doctest::Approx(1.0));
  CHECK(result.image.at(31, 32, 0) == doctest::Approx(1.0));
  CHECK(result.image.at(32, 32, 1) == doctest::Approx(0.0));
  // Far off-center column is outside the red band.
  CHECK(result.image.at(2, 32, 0) == doctest::Approx(0.0));
}

TEST_CASE("top view samples only the top panorama rows") {
  PanoramaImage pano(256, 128, 1);
  for (int y = 0; y < pano.height / 2; ++y)
    for (int x = 0; x < pano.width; ++x) pano.at(x, y, 0) = 1.0f;

  const ViewWindow top = ViewWindow::make(0.0, kPi / 2.0, kPi / 2.0, kPi / 2.0, 48, 48);
  const ProjectionResult result = pano_to_perspective(pano, top);
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 48; ++x) CHECK(result.image.at(x, y, 0) == doctest::Approx(1.0));
}

TEST_CASE("closed-form oracle: coordinate panorama reproduces sphere coordinates") {
  const PanoramaImage pano = coordinate_panorama(512, 256);
  const ViewWindow window = ViewWindow::make(0.35, 0.2, deg_to_rad(70.0), deg_to_rad(55.0), 96, 96);
  const ProjectionResult result = pano_to_perspective(pano, window);

  const double tolerance = 2.0 / 96.0;
  double max_err = 0.0;
  for (int y = 0; y < 96; ++y) {
    for (int x = 0; x < 96; ++x) {
      const Vec3 dir = oracle_direction(window, x, y);
      const double lon = std::atan2(dir.y(), dir.x());
      const double lat = std::asin(dir.z() / dir.norm());
      max_err = std::max(max_err, std::abs(result.image.at(x, y, 0) - (lon / (2.0 * kPi) + 0.5)));
      max_err = std::max(max_err, std::abs(result.image.at(x, y, 1) - (lat / kPi + 0.5)));
    }
  }
  CHECK(max_err < tolerance);
}

TEST_CASE("round trip pano -> perspective -> pano on a band-limited pattern") {
  const PanoramaImage pano = band_limited_panorama(512, 256, 3);
  const ViewWindow front = ViewWindow::make(0.0, 0.0, kPi / 2.0, kPi / 2.0, 256, 256);

  const ProjectionResult persp = pano_to_perspective(pano, front);
  const SplatResult splat = perspective_to_pano(persp.image, front, pano.width, pano.height);

  double err_sum = 0.0, err_max = 0.0;
  size_t count = 0;
  for (int y = 0; y < pano.height; ++y)
    for (int x = 0; x < pano.width; ++x) {
      if (!splat.coverage.at(x, y)) continue;
      for (int c = 0; c < 3; ++c) {
        const double e = std::abs(splat.pano.at(x, y, c) - pano.at(x, y, c));
        err_sum += e;
        err_max = std::max(err_max, e);
        ++count;
      }
    }
  REQUIRE(count > 0);
  CHECK(err_sum / double(count) < 0.02);
  CHECK(err_max < 0.1);
}

TEST_CASE("perspective -> pano -> perspective recovers the view") {
  const PanoramaImage pano = band_limited_panorama(512, 256, 3);
  const ViewWindow front = ViewWindow::make(0.0, 0.0, kPi / 2.0, kPi / 2.0, 128, 128);
  const PerspectiveImage view = pano_to_perspective(pano, front).image;

  const SplatResult splat = perspective_to_pano(view, front, 512, 256);
  const PerspectiveImage back = pano_to_perspective(splat.pano, front).image;

  double err_sum = 0.0;
  size_t count = 0;
  // Skip a one-pixel border where the footprint boundary mixes canvas zeros.
  for (int y = 1; y < 127; ++y)
    for (int x = 1; x < 127; ++x)
      for (int c = 0; c < 3; ++c) {
        err_sum += std::abs(back.at(x, y, c) - view.at(x, y, c));
        ++count;
      }
  CHECK(err_sum / double(count) < 0.02);
}

TEST_CASE("90-degree window covers one sixth of the sphere") {
  const PanoramaImage pano = band_limited_panorama(256, 128, 1);
  const ViewWindow window = ViewWindow::make(0.0, 0.0, kPi / 2.0, kPi / 2.0, 96, 96);
  const PerspectiveImage view = pano_to_perspective(pano, window).image;
  const SplatResult splat = perspective_to_pano(view, window, 256, 128);

  // Quadrature of the covered solid angle over the equirectangular grid.
  double steradians = 0.0;
  const double cell = (2.0 * kPi / 256) * (kPi / 128);
  for (int y = 0; y < 128; ++y) {
    const double lat = (0.5 - (y + 0.5) / 128.0) * kPi;
    for (int x = 0; x < 256; ++x)
      if (splat.coverage.at(x, y)) steradians += cell * std::cos(lat);
  }
  const double expected = 4.0 * kPi / 6.0;
  CHECK(std::abs(steradians - expected) / expected < 0.05);
}

TEST_CASE("coverage equals the frustum predicate recomputed per pixel") {
  const PanoramaImage pano = band_limited_panorama(128, 64, 1);
  const ViewWindow window = ViewWindow::make(1.1, -0.35, deg_to_rad(85.0), deg_to_rad(60.0), 64, 64);
  const PerspectiveImage view = pano_to_perspective(pano, window).image;
  const SplatResult splat = perspective_to_pano(view, window, 128, 64);

  const Mat3 rot_t = window_rotation(window).transpose();
  const double wl = std::tan(window.hfov / 2.0);
  const double hl = std::tan(window.vfov / 2.0);
  for (int y = 0; y < 64; ++y) {
    const double lat = (0.5 - (y + 0.5) / 64.0) * kPi;
    for (int x = 0; x < 128; ++x) {
      const double lon = ((x + 0.5) / 128.0 - 0.5) * 2.0 * kPi;
      const Vec3 cam = rot_t * sphere_direction(lon, lat);
      const bool predicate =
          cam.x() > 0.0 && std::abs(cam.y() / cam.x()) < wl && std::abs(cam.z() / cam.x()) < hl;
      CHECK(splat.coverage.at(x, y) == predicate);
    }
  }
}

TEST_CASE("empty perspective produces zero coverage") {
  PerspectiveImage empty(32, 32, 1);
  std::fill(empty.valid.begin(), empty.valid.end(), 0);
  const ViewWindow window = ViewWindow::make(0.0, 0.0, kPi / 2.0, kPi / 2.0, 32, 32);
  const SplatResult splat = perspective_to_pano(empty, window, 128, 64);
  CHECK(splat.coverage.count() == 0);
}

TEST_CASE("split_panorama yaw centers and overlap") {
  const PanoramaImage pano = band_limited_panorama(256, 128, 1);

  SUBCASE("n=4, no overlap, 90-degree views tile exactly") {
    const PanoramaSplit split = split_panorama(pano, 4, 0.0, kPi / 2.0);
    REQUIRE(split.views.size() == 4);
    CHECK(split.full_coverage);
    const double expected[] = {0.0, kPi / 2.0, -kPi, -kPi / 2.0};  // wrapped into [-pi, pi)
    for (int k = 0; k < 4; ++k)
      CHECK(wrap_angle(split.views[k].second.yaw - expected[k]) == doctest::Approx(0.0).epsilon(1e-12));
    // Disjoint: footprint half-width equals half the spacing.
    CHECK(split.views[0].second.hfov == doctest::Approx(kPi / 2.0));
  }

  SUBCASE("n=6 with one-third overlap shares 30 degrees of yaw") {
    const PanoramaSplit split = split_panorama(pano, 6, 1.0 / 3.0, kPi / 2.0);
    REQUIRE(split.views.size() == 6);
    const double spacing =
        wrap_angle(split.views[1].second.yaw - split.views[0].second.yaw);
    CHECK(spacing == doctest::Approx(2.0 * kPi / 6.0).epsilon(1e-12));
    const double shared = split.views[0].second.hfov - spacing;
    CHECK(shared == doctest::Approx(deg_to_rad(30.0)).epsilon(1e-12));
    CHECK(split.full_coverage);
  }

  SUBCASE("n=8 keyframes sit at 45-degree spacing") {
    const PanoramaSplit split = split_panorama(pano, 8, 0.5, kPi / 2.0);
    REQUIRE(split.views.size() == 8);
    for (int k = 1; k < 8; ++k) {
      const double spacing =
          wrap_angle(split.views[k].second.yaw - split.views[k - 1].second.yaw);
      CHECK(spacing == doctest::Approx(deg_to_rad(45.0)).epsilon(1e-12));
    }
  }

  SUBCASE("parameters out of range are rejected") {
    CHECK_THROWS_AS(split_panorama(pano, 2, 0.0, kPi / 2.0), std::invalid_argument);
    CHECK_THROWS_AS(split_panorama(pano, 13, 0.0, kPi / 2.0), std::invalid_argument);
    CHECK_THROWS_AS(split_panorama(pano, 4, 0.7, kPi / 2.0), std::invalid_argument);
    CHECK_THROWS_AS(split_panorama(pano, 4, 0.0, kPi), std::invalid_argument);
  }
}

TEST_CASE("yaw periodicity: theta and theta + 2pi give the same raster") {
  const PanoramaImage pano = band_limited_panorama(256, 128, 2);
  const double yaw = 0.71;
  const ViewWindow a = ViewWindow::make(yaw, 0.1, 1.2, 1.0, 48, 48);
  const ViewWindow b = ViewWindow::make(yaw + 2.0 * kPi, 0.1, 1.2, 1.0, 48, 48);
  const PerspectiveImage ia = pano_to_perspective(pano, a).image;
  const PerspectiveImage ib = pano_to_perspective(pano, b).image;
  double max_diff = 0.0;
  for (size_t i = 0; i < ia.data.size(); ++i)
    max_diff = std::max(max_diff, std::abs(double(ia.data[i]) - ib.data[i]));
  CHECK(max_diff <= 1e-9);
}

TEST_CASE("pitch symmetry: flipped panorama with negated pitch flips the view") {
  const PanoramaImage pano = band_limited_panorama(256, 128, 1);
  PanoramaImage flipped(256, 128, 1);
  for (int y = 0; y < 128; ++y)
    for (int x = 0; x < 256; ++x) flipped.at(x, y, 0) = pano.at(x, 127 - y, 0);

  const ViewWindow up = ViewWindow::make(0.4, 0.35, 1.1, 0.9, 40, 40);
  const ViewWindow down = ViewWindow::make(0.4, -0.35, 1.1, 0.9, 40, 40);
  const PerspectiveImage a = pano_to_perspective(pano, up).image;
  const PerspectiveImage b = pano_to_perspective(flipped, down).image;
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 40; ++x)
      CHECK(a.at(x, y, 0) == doctest::Approx(b.at(x, 39 - y, 0)).epsilon(1e-9));
}

TEST_CASE("window validation") {
  CHECK_THROWS_AS(ViewWindow::make(0.0, 2.0, 1.0, 1.0, 8, 8), std::invalid_argument);
  CHECK_THROWS_AS(ViewWindow::make(0.0, 0.0, 0.0, 1.0, 8, 8), std::invalid_argument);
  CHECK_THROWS_AS(ViewWindow::make(0.0, 0.0, 1.0, kPi, 8, 8), std::invalid_argument);
  CHECK_THROWS_AS(ViewWindow::make(0.0, 0.0, 1.0, 1.0, 0, 8), std::invalid_argument);
  // Yaw wraps instead of failing.
  CHECK(ViewWindow::make(3.0 * kPi, 0.0, 1.0, 1.0, 8, 8).yaw == doctest::Approx(-kPi));
}
