#include <doctest.h>

#include "support.hpp"

using namespace rtms::math;
using rtms::test::random_transform;

TEST_CASE("compose with identity and pure translations") {
  RigidTransform t = RigidTransform::from_axis_angle(Eigen::Vector3d::UnitZ(), 0.4,
                                                     {1, 2, 3});
  CHECK(translation_distance(compose(RigidTransform::identity(), t), t) == 0);
  CHECK(rotation_angle(compose(RigidTransform::identity(), t), t) == 0);

  auto a = RigidTransform::from_translation({1, 2, 3});
  auto b = RigidTransform::from_translation({4, 5, 6});
  CHECK(compose(a, b).translation() == Eigen::Vector3d(5, 7, 9));
}

TEST_CASE("compose and invert round-trip to the identity") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    RigidTransform t = random_transform(rng);
    RigidTransform round = compose(t, invert(t));
    CAPTURE(i);
    CHECK(round.translation().norm() <= 1e-12);
    CHECK(rotation_angle(round, RigidTransform::identity()) <= 1e-12);
  }
}

TEST_CASE("apply matches the rotation-then-offset definition") {
  CHECK(apply(RigidTransform::identity(), {7, -3, 2}) == Eigen::Vector3d(7, -3, 2));

  // 90 degrees about S(z) maps R(x) to A(y).
  auto quarter = RigidTransform::from_axis_angle(Eigen::Vector3d::UnitZ(), EIGEN_PI / 2);
  CHECK((apply(quarter, {1, 0, 0}) - Eigen::Vector3d(0, 1, 0)).norm() <= 1e-15);

  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> coord(-100.0, 100.0);
  for (int i = 0; i < 200; ++i) {
    RigidTransform a = random_transform(rng);
    RigidTransform b = random_transform(rng);
    Eigen::Vector3d p(coord(rng), coord(rng), coord(rng));
    CHECK((apply(compose(a, b), p) - apply(a, apply(b, p))).norm() <= 1e-12 * 200);
  }
}

TEST_CASE("interpolation endpoints are exact and the midpoint halves the angle") {
  std::mt19937_64 rng(13);
  RigidTransform a = random_transform(rng);
  RigidTransform b = random_transform(rng);
  CHECK(translation_distance(interpolate_pose(a, b, 0.0), a) == 0);
  CHECK(translation_distance(interpolate_pose(a, b, 1.0), b) == 0);
  CHECK(rotation_angle(interpolate_pose(a, b, 0.0), a) == 0);
  CHECK(rotation_angle(interpolate_pose(a, b, 1.0), b) == 0);

  auto zero = RigidTransform::identity();
  auto quarter = RigidTransform::from_axis_angle(Eigen::Vector3d::UnitZ(), EIGEN_PI / 2);
  auto mid = interpolate_pose(zero, quarter, 0.5);
  CHECK(rotation_angle(mid, zero) == doctest::Approx(EIGEN_PI / 4).epsilon(1e-12));
}

TEST_CASE("angular distance grows monotonically along the interpolation") {
  std::mt19937_64 rng(14);
  for (int pair = 0; pair < 100; ++pair) {
    RigidTransform a = random_transform(rng);
    RigidTransform b = random_transform(rng);
    double previous = -1.0;
    for (int k = 0; k <= 20; ++k) {
      double s = k / 20.0;
      double angle = rotation_angle(interpolate_pose(a, b, s), a);
      CAPTURE(pair);
      CAPTURE(s);
      CHECK(angle >= previous - 1e-12);
      previous = angle;
    }
  }
}

TEST_CASE("quaternion and matrix representations round-trip") {
  std::mt19937_64 rng(15);
  for (int i = 0; i < 1000; ++i) {
    RigidTransform t = random_transform(rng);
    RigidTransform back = RigidTransform::from_matrix(t.matrix());
    CAPTURE(i);
    CHECK(rotation_angle(t, back) <= 1e-12);
    CHECK(translation_distance(t, back) <= 1e-12);
  }
}

TEST_CASE("rotation matrix stays orthonormal after many compositions") {
  std::mt19937_64 rng(16);
  RigidTransform t;
  for (int i = 0; i < 2000; ++i) {
    t = compose(t, random_transform(rng, 1.0));
  }
  Eigen::Matrix3d r = t.rotation_matrix();
  CHECK((r * r.transpose() - Eigen::Matrix3d::Identity()).norm() <= 1e-9);
  CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("quaternions are canonical with non-negative leading coefficient") {
  RigidTransform t(Eigen::Quaterniond(-0.5, 0.5, 0.5, 0.5), Eigen::Vector3d::Zero());
  CHECK(t.rotation().w() >= 0);
  // w == 0: the first nonzero of (x, y, z) must be positive.
  RigidTransform half(Eigen::Quaterniond(0.0, -1.0, 0.0, 0.0), Eigen::Vector3d::Zero());
  CHECK(half.rotation().x() > 0);
}

TEST_CASE("column-major 3x4 layout round-trips") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    RigidTransform t = random_transform(rng);
    RigidTransform back = RigidTransform::from_columns34(t.to_columns34());
    // float32 quantization bounds the round trip, not double precision
    CHECK(rotation_angle(t, back) <= 1e-6);
    CHECK(translation_distance(t, back) <= 1e-4);
  }
  auto cols = RigidTransform::identity().to_columns34();
  std::array<float, 12> expected{1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0};
  CHECK(cols == expected);
}
