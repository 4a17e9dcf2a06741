#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "camreloc/geometry.hpp"
#include "support/test_util.hpp"

using namespace camreloc;
using testutil::random_intrinsics;
using testutil::random_pose;
using testutil::random_rotation;

namespace {

// Independent route: full homogeneous 3x4 product, explicit normalization.
Vec2 project_matrix_oracle(const Intrinsics& K, const PoseSE3& M, const Vec3& P) {
  Eigen::Vector4d ph;
  ph << P, 1.0;
  const Eigen::Vector3d uvw = K.matrix() * (M.matrix() * ph);
  return Vec2(uvw.x() / uvw.z(), uvw.y() / uvw.z());
}

}  // namespace

TEST_CASE("project on the optical axis") {
  const Intrinsics K(100.0, 100.0, 0.0, 0.0);
  const Vec2 p = project(K, PoseSE3::identity(), Vec3(0.0, 0.0, 2.0));
  CHECK(p.x() == doctest::Approx(0.0));
  CHECK(p.y() == doctest::Approx(0.0));
}

TEST_CASE("project scales by focal length over depth") {
  const Intrinsics K(100.0, 100.0, 50.0, 50.0);
  const Vec2 p = project(K, PoseSE3::identity(), Vec3(1.0, 0.0, 2.0));
  CHECK(p.x() == doctest::Approx(100.0));
  CHECK(p.y() == doctest::Approx(50.0));
}

TEST_CASE("project equals the homogeneous matrix oracle") {
  Rng rng(42);
  for (int i = 0; i < 200; ++i) {
    const Intrinsics K = random_intrinsics(rng);
    const PoseSE3 M = random_pose(rng);
    Vec3 P;
    do {
      P = Vec3(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10));
    } while (M.apply(P).z() <= 0.1);
    const Vec2 got = project(K, M, P);
    const Vec2 expected = project_matrix_oracle(K, M, P);
    CHECK((got - expected).norm() < 1e-9);
  }
}

TEST_CASE("project rejects non-positive depth") {
  const Intrinsics K(100.0, 100.0, 0.0, 0.0);
  CHECK_THROWS_AS(project(K, PoseSE3::identity(), Vec3(0.0, 0.0, -1.0)), Error);
  CHECK_THROWS_AS(project(K, PoseSE3::identity(), Vec3(0.0, 0.0, 0.0)), Error);
}

TEST_CASE("backproject basics") {
  const Intrinsics K(100.0, 100.0, 0.0, 0.0);
  const Vec3 p = backproject(K, Vec2(50.0, 0.0), 2.0);
  CHECK(p.x() == doctest::Approx(1.0));
  CHECK(p.y() == doctest::Approx(0.0));
  CHECK(p.z() == doctest::Approx(2.0));

  const Intrinsics K2(320.0, 240.0, 160.0, 120.0);
  const Vec3 pp = backproject(K2, Vec2(160.0, 120.0), 3.5);
  CHECK(pp.x() == doctest::Approx(0.0));
  CHECK(pp.y() == doctest::Approx(0.0));
  CHECK(pp.z() == doctest::Approx(3.5));

  CHECK_THROWS_AS(backproject(K, Vec2(0.0, 0.0), 0.0), Error);
}

TEST_CASE("project and backproject are mutual inverses") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const Intrinsics K = random_intrinsics(rng);
    const Vec2 pixel(rng.uniform(0.0, 640.0), rng.uniform(0.0, 480.0));
    const double z = rng.uniform(0.1, 50.0);
    const Vec3 cam = backproject(K, pixel, z);
    const Vec2 round = project(K, PoseSE3::identity(), cam);
    CHECK((round - pixel).norm() < 1e-9);
  }
}

TEST_CASE("compose and invert obey the group axioms") {
  CHECK(invert(PoseSE3::identity()) == PoseSE3::identity());
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const PoseSE3 a = random_pose(rng);
    const PoseSE3 ident = compose(a, invert(a));
    CHECK((ident.rotation() - Mat3::Identity()).norm() < 1e-9);
    CHECK(ident.translation().norm() < 1e-9);
  }
}

TEST_CASE("compose equals the homogeneous matrix oracle") {
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    const PoseSE3 a = random_pose(rng);
    const PoseSE3 b = random_pose(rng);
    const Eigen::Matrix4d expected = a.homogeneous() * b.homogeneous();
    const Eigen::Matrix4d got = compose(a, b).homogeneous();
    CHECK((got - expected).norm() < 1e-9);
  }
}

TEST_CASE("euler angles of the identity are zero") {
  const EulerZYX e = rotation_to_euler(Mat3::Identity());
  CHECK(e.yaw_deg == doctest::Approx(0.0));
  CHECK(e.pitch_deg == doctest::Approx(0.0));
  CHECK(e.roll_deg == doctest::Approx(0.0));
  CHECK_FALSE(e.gimbal_lock);
}

TEST_CASE("single-axis rotations land in one angle") {
  {
    const Mat3 r = rotation_about_axis(Vec3::UnitZ(), deg2rad(10.0));
    const EulerZYX e = rotation_to_euler(r);
    CHECK(e.yaw_deg == doctest::Approx(10.0));
    CHECK(e.pitch_deg == doctest::Approx(0.0));
    CHECK(e.roll_deg == doctest::Approx(0.0));
  }
  {
    const Mat3 r = rotation_about_axis(Vec3::UnitX(), deg2rad(10.0));
    const EulerZYX e = rotation_to_euler(r);
    CHECK(e.roll_deg == doctest::Approx(10.0));
    CHECK(e.yaw_deg == doctest::Approx(0.0));
    CHECK(e.pitch_deg == doctest::Approx(0.0));
  }
}

TEST_CASE("euler round-trip away from gimbal lock") {
  Rng rng(17);
  int tested = 0;
  while (tested < 200) {
    const Mat3 r = random_rotation(rng);
    const EulerZYX e = rotation_to_euler(r);
    if (e.gimbal_lock || std::abs(std::abs(e.pitch_deg) - 90.0) < 1.0) continue;
    const Mat3 back = euler_to_rotation(e);
    CHECK((back - r).norm() < 1e-6);
    ++tested;
  }
}

TEST_CASE("gimbal lock is flagged and still canonical") {
  const Mat3 r = rotation_about_axis(Vec3::UnitY(), deg2rad(90.0));
  const EulerZYX e = rotation_to_euler(r);
  CHECK(e.gimbal_lock);
  const Mat3 back = euler_to_rotation(e);
  CHECK((back - r).norm() < 1e-6);
}

TEST_CASE("quaternion conversion ignores sign") {
  Rng rng(19);
  for (int i = 0; i < 100; ++i) {
    const Mat3 r = random_rotation(rng);
    const UnitQuaternion q = rotation_to_quaternion(r);
    const UnitQuaternion neg{-q.w, -q.x, -q.y, -q.z};
    CHECK((quaternion_to_rotation(q) - r).norm() < 1e-9);
    CHECK((quaternion_to_rotation(neg) - r).norm() < 1e-9);
  }
}

TEST_CASE("pose constructor rejects non-orthonormal rotations") {
  Mat3 bad = Mat3::Identity();
  bad(0, 0) = 1.01;
  CHECK_THROWS_AS(PoseSE3(bad, Vec3::Zero()), Error);
  Mat3 reflection = Mat3::Identity();
  reflection(2, 2) = -1.0;
  CHECK_THROWS_AS(PoseSE3(reflection, Vec3::Zero()), Error);
}

TEST_CASE("intrinsics reject non-positive focal lengths") {
  CHECK_THROWS_AS(Intrinsics(0.0, 100.0, 0.0, 0.0), Error);
  CHECK_THROWS_AS(Intrinsics(100.0, -5.0, 0.0, 0.0), Error);
}
