#include "rtms/math/rigid_transform.hpp"

#include <algorithm>
#include <cmath>

namespace rtms::math {

namespace {

// Unit norm, then sign-canonical: first nonzero of (w, x, y, z) positive.
Eigen::Quaterniond canonical(Eigen::Quaterniond q) {
  q.normalize();
  const double* c = q.coeffs().data();  // x, y, z, w
  double lead[4] = {c[3], c[0], c[1], c[2]};
  for (double v : lead) {
    if (v > 0) break;
    if (v < 0) {
      q.coeffs() = -q.coeffs();
      break;
    }
  }
  return q;
}

}  // namespace

RigidTransform::RigidTransform(const Eigen::Quaterniond& rotation,
                               const Eigen::Vector3d& translation)
    : rotation_(canonical(rotation)), translation_(translation) {}

RigidTransform RigidTransform::from_matrix(const Eigen::Matrix4d& m) {
  return from_rotation_matrix(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
}

RigidTransform RigidTransform::from_rotation_matrix(const Eigen::Matrix3d& r,
                                                    const Eigen::Vector3d& t) {
  return RigidTransform(Eigen::Quaterniond(r), t);
}

RigidTransform RigidTransform::from_axis_angle(const Eigen::Vector3d& axis,
                                               double angle_rad,
                                               const Eigen::Vector3d& translation) {
  return RigidTransform(Eigen::Quaterniond(Eigen::AngleAxisd(angle_rad, axis.normalized())),
                        translation);
}

Eigen::Matrix4d RigidTransform::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_.toRotationMatrix();
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

std::array<float, 12> RigidTransform::to_columns34() const {
  Eigen::Matrix3d r = rotation_.toRotationMatrix();
  std::array<float, 12> out{};
  for (int col = 0; col < 3; ++col) {
    for (int row = 0; row < 3; ++row) {
      out[static_cast<std::size_t>(3 * col + row)] = static_cast<float>(r(row, col));
    }
  }
  out[9] = static_cast<float>(translation_.x());
  out[10] = static_cast<float>(translation_.y());
  out[11] = static_cast<float>(translation_.z());
  return out;
}

RigidTransform RigidTransform::from_columns34(const std::array<float, 12>& c) {
  Eigen::Matrix3d r;
  for (int col = 0; col < 3; ++col) {
    for (int row = 0; row < 3; ++row) {
      r(row, col) = c[static_cast<std::size_t>(3 * col + row)];
    }
  }
  Eigen::Vector3d t(c[9], c[10], c[11]);
  return from_rotation_matrix(r, t);
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  return RigidTransform(a.rotation() * b.rotation(),
                        a.rotation() * b.translation() + a.translation());
}

RigidTransform invert(const RigidTransform& t) {
  Eigen::Quaterniond inv = t.rotation().conjugate();
  return RigidTransform(inv, -(inv * t.translation()));
}

Eigen::Vector3d apply(const RigidTransform& t, const Eigen::Vector3d& p) {
  return t.rotation() * p + t.translation();
}

RigidTransform interpolate_pose(const RigidTransform& a, const RigidTransform& b,
                                double s) {
  if (s <= 0.0) return a;
  if (s >= 1.0) return b;
  Eigen::Quaterniond q = a.rotation().slerp(s, b.rotation());
  Eigen::Vector3d t = (1.0 - s) * a.translation() + s * b.translation();
  return RigidTransform(q, t);
}

double rotation_angle(const RigidTransform& a, const RigidTransform& b) {
  return a.rotation().angularDistance(b.rotation());
}

double translation_distance(const RigidTransform& a, const RigidTransform& b) {
  return (a.translation() - b.translation()).norm();
}

bool approx_equal(const RigidTransform& a, const RigidTransform& b, double tol_mm,
                  double tol_rad) {
  return translation_distance(a, b) <= tol_mm && rotation_angle(a, b) <= tol_rad;
}

}  // namespace rtms::math
