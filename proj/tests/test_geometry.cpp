#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "voxrec/geometry.hpp"

using namespace voxrec;

namespace {

const CameraIntrinsics kIntr{500.0, 500.0, 320.0, 240.0, 640, 480};

Mat3 rot_z(double radians) {
  Mat3 r;
  r << std::cos(radians), -std::sin(radians), 0.0,
       std::sin(radians),  std::cos(radians), 0.0,
       0.0, 0.0, 1.0;
  return r;
}

}  // namespace

TEST_CASE("unproject_pixel maps the principal point onto the optical axis") {
  const Vec3 p = unproject_pixel(kIntr, PixelCoord{320.0, 240.0}, 1000.0);
  CHECK(p.x() == 0.0);
  CHECK(p.y() == 0.0);
  CHECK(p.z() == 1000.0);
}

TEST_CASE("unproject_pixel at zero depth collapses to the origin") {
  const Vec3 p = unproject_pixel(kIntr, PixelCoord{57.0, 411.0}, 0.0);
  CHECK(p == Vec3(0.0, 0.0, 0.0));
}

TEST_CASE("unproject_pixel hand-evaluated off-axis sample") {
  const Vec3 p = unproject_pixel(kIntr, PixelCoord{820.0, 240.0}, 2000.0);
  CHECK(p.x() == doctest::Approx(2000.0).epsilon(1e-12));
  CHECK(p.y() == doctest::Approx(0.0));
  CHECK(p.z() == 2000.0);
}

TEST_CASE("unproject_pixel rejects non-finite and negative inputs") {
  CHECK_THROWS_AS(unproject_pixel(kIntr, PixelCoord{0.0, 0.0}, -1.0), DomainError);
  CHECK_THROWS_AS(unproject_pixel(kIntr, PixelCoord{0.0, 0.0}, std::nan("")), DomainError);
  CHECK_THROWS_AS(unproject_pixel(kIntr, PixelCoord{std::nan(""), 0.0}, 10.0), DomainError);
}

TEST_CASE("unproject_pixel is linear in depth") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> px(0.0, 639.0), py(0.0, 479.0), dd(1.0, 9000.0);
  for (int i = 0; i < 200; ++i) {
    const PixelCoord at{px(rng), py(rng)};
    const double d = dd(rng);
    const Vec3 one = unproject_pixel(kIntr, at, d);
    const Vec3 two = unproject_pixel(kIntr, at, 2.0 * d);
    CHECK((two - 2.0 * one).cwiseAbs().maxCoeff() <= 1e-9 * d);
  }
}

TEST_CASE("project_point inverts unproject_pixel on the axis and off it") {
  auto [px0, d0] = project_point(kIntr, Vec3(0.0, 0.0, 1000.0));
  CHECK(px0.u == 320.0);
  CHECK(px0.v == 240.0);
  CHECK(d0 == 1000.0);

  auto [px1, d1] = project_point(kIntr, Vec3(2000.0, 0.0, 2000.0));
  CHECK(px1.u == doctest::Approx(820.0).epsilon(1e-12));
  CHECK(px1.v == doctest::Approx(240.0));
  CHECK(d1 == 2000.0);
}

TEST_CASE("project_point rejects points behind the camera") {
  CHECK_THROWS_AS(project_point(kIntr, Vec3(0.0, 0.0, 0.0)), DomainError);
  CHECK_THROWS_AS(project_point(kIntr, Vec3(1.0, 1.0, -5.0)), DomainError);
}

TEST_CASE("projection round trip over random in-frame pixels") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> px(0.0, 639.0), py(0.0, 479.0);
  std::uniform_real_distribution<double> dd(1.0 + 1e-9, 100000.0);
  for (int i = 0; i < 2000; ++i) {
    const PixelCoord at{px(rng), py(rng)};
    const double d = dd(rng);
    const auto [back, depth] = project_point(kIntr, unproject_pixel(kIntr, at, d));
    CHECK(std::abs(back.u - at.u) < 1e-6);
    CHECK(std::abs(back.v - at.v) < 1e-6);
    CHECK(std::abs(depth - d) < 1e-6);
  }
}

TEST_CASE("transform_point applies rotation then translation") {
  CHECK(transform_point(Pose::identity(), Vec3(1.0, 2.0, 3.0)) == Vec3(1.0, 2.0, 3.0));

  Pose quarter;
  quarter.rotation = rot_z(std::acos(-1.0) / 2.0);
  const Vec3 turned = transform_point(quarter, Vec3(1.0, 0.0, 0.0));
  CHECK(turned.x() == doctest::Approx(0.0));
  CHECK(turned.y() == doctest::Approx(1.0));
  CHECK(turned.z() == doctest::Approx(0.0));

  quarter.translation = Vec3(10.0, 0.0, 0.0);
  const Vec3 moved = transform_point(quarter, Vec3(1.0, 0.0, 0.0));
  CHECK(moved.x() == doctest::Approx(10.0));
  CHECK(moved.y() == doctest::Approx(1.0));
  CHECK(moved.z() == doctest::Approx(0.0));
}

TEST_CASE("compose_pose follows a(b(p)) and two 45-degree turns make 90") {
  std::mt19937_64 rng(3);
  const Pose b = testutil::random_pose(rng);

  const Pose left = compose_pose(Pose::identity(), b);
  CHECK((left.rotation - b.rotation).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((left.translation - b.translation).cwiseAbs().maxCoeff() <= 1e-15);

  Pose eighth;
  eighth.rotation = rot_z(std::acos(-1.0) / 4.0);
  const Pose quarter = compose_pose(eighth, eighth);
  CHECK((quarter.rotation - rot_z(std::acos(-1.0) / 2.0)).cwiseAbs().maxCoeff() <= 1e-12);

  const Pose a = testutil::random_pose(rng);
  const Vec3 p(12.0, -7.0, 31.0);
  const Vec3 direct = transform_point(compose_pose(a, b), p);
  const Vec3 nested = transform_point(a, transform_point(b, p));
  CHECK((direct - nested).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("invert_pose round-trips points and handles pure translation") {
  CHECK(invert_pose(Pose::identity()).rotation == Mat3::Identity());

  Pose lift;
  lift.translation = Vec3(0.0, 0.0, 5.0);
  CHECK(invert_pose(lift).translation == Vec3(0.0, 0.0, -5.0));

  std::mt19937_64 rng(5);
  const Pose a = testutil::random_pose(rng);
  const Pose inv = invert_pose(a);
  std::uniform_real_distribution<double> coord(-10000.0, 10000.0);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p(coord(rng), coord(rng), coord(rng));
    const Vec3 back = transform_point(inv, transform_point(a, p));
    CHECK((back - p).cwiseAbs().maxCoeff() <= 1e-9);
  }

  const Pose round = compose_pose(a, inv);
  CHECK((round.rotation - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(round.translation.cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("poses act as isometries on point pairs") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> coord(-5000.0, 5000.0);
  for (int n = 0; n < 50; ++n) {
    const Pose pose = testutil::random_pose(rng);
    for (int i = 0; i < 20; ++i) {
      const Vec3 a(coord(rng), coord(rng), coord(rng));
      const Vec3 b(coord(rng), coord(rng), coord(rng));
      const double before = (a - b).norm();
      const double after = (transform_point(pose, a) - transform_point(pose, b)).norm();
      CHECK(std::abs(before - after) <= 1e-6 * std::max(before, 1.0));
    }
  }
}

TEST_CASE("pose validation rejects reflections and non-orthonormal matrices") {
  Pose mirror;
  mirror.rotation << 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(mirror.validate(), DomainError);

  Pose skew;
  skew.rotation << 1.0, 0.1, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(skew.validate(), DomainError);

  CHECK_NOTHROW(Pose::identity().validate());
}

TEST_CASE("intrinsics validation enforces positive focal lengths and in-frame center") {
  CameraIntrinsics bad = kIntr;
  bad.fx = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = kIntr;
  bad.cx = 640.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = kIntr;
  bad.width = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK_NOTHROW(kIntr.validate());
}

TEST_CASE("unproject_frame skips invalid pixels and honors the stride lattice") {
  CameraIntrinsics small{100.0, 100.0, 1.0, 1.0, 4, 4};

  DepthFrame empty = DepthFrame::constant(4, 4, 0.0f);
  CHECK(unproject_frame(small, empty, nullptr, Pose::identity(), 1).empty());

  CameraIntrinsics two{100.0, 100.0, 0.5, 0.5, 2, 2};
  DepthFrame one = DepthFrame::constant(2, 2, 0.0f);
  one.at(1, 0) = 750.0f;
  const PointCloud single = unproject_frame(two, one, nullptr, Pose::identity(), 1);
  REQUIRE(single.size() == 1);
  CHECK(single.points[0] == unproject_pixel(two, PixelCoord{1.0, 0.0}, 750.0));
  CHECK(single.colors[0] == Color8{255, 255, 255});

  DepthFrame full = DepthFrame::constant(4, 4, 500.0f);
  CHECK(unproject_frame(small, full, nullptr, Pose::identity(), 2).size() == 4);
}

TEST_CASE("unproject_frame emits row-major points with matching colors") {
  CameraIntrinsics two{100.0, 100.0, 0.5, 0.5, 2, 2};
  DepthFrame depth = DepthFrame::constant(2, 2, 1000.0f);
  ColorFrame color = ColorFrame::constant(2, 2, Color8{1, 2, 3});
  color.at(1, 1) = Color8{9, 8, 7};

  Pose lift;
  lift.translation = Vec3(0.0, 0.0, 100.0);
  const PointCloud cloud = unproject_frame(two, depth, &color, lift, 1);
  REQUIRE(cloud.size() == 4);
  CHECK(cloud.points[0] == transform_point(lift, unproject_pixel(two, PixelCoord{0.0, 0.0}, 1000.0)));
  CHECK(cloud.points[3] == transform_point(lift, unproject_pixel(two, PixelCoord{1.0, 1.0}, 1000.0)));
  CHECK(cloud.colors[0] == Color8{1, 2, 3});
  CHECK(cloud.colors[3] == Color8{9, 8, 7});
  CHECK(cloud.frame == Frame::kWorld);
}

TEST_CASE("unproject_frame rejects mismatched dimensions and bad strides") {
  CameraIntrinsics two{100.0, 100.0, 0.5, 0.5, 2, 2};
  DepthFrame depth = DepthFrame::constant(2, 2, 100.0f);
  DepthFrame wrong = DepthFrame::constant(3, 2, 100.0f);
  ColorFrame color = ColorFrame::constant(3, 3, Color8{});

  CHECK_THROWS_AS(unproject_frame(two, wrong, nullptr, Pose::identity(), 1), ShapeError);
  CHECK_THROWS_AS(unproject_frame(two, depth, &color, Pose::identity(), 1), ShapeError);
  CHECK_THROWS_AS(unproject_frame(two, depth, nullptr, Pose::identity(), 0), DomainError);
}
