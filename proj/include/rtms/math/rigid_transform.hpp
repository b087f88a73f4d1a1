#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <array>

namespace rtms::math {

// Rigid transform mapping child-frame coordinates into parent-frame
// coordinates. Rotation is a unit quaternion kept in canonical form
// (w >= 0); translation is millimetres, RAS convention.
class RigidTransform {
 public:
  RigidTransform()
      : rotation_(Eigen::Quaterniond::Identity()),
        translation_(Eigen::Vector3d::Zero()) {}

  RigidTransform(const Eigen::Quaterniond& rotation, const Eigen::Vector3d& translation);

  static RigidTransform identity() { return {}; }
  static RigidTransform from_matrix(const Eigen::Matrix4d& m);
  static RigidTransform from_rotation_matrix(const Eigen::Matrix3d& r,
                                             const Eigen::Vector3d& t);
  static RigidTransform from_axis_angle(const Eigen::Vector3d& axis, double angle_rad,
                                        const Eigen::Vector3d& translation =
                                            Eigen::Vector3d::Zero());
  static RigidTransform from_translation(const Eigen::Vector3d& t) {
    return RigidTransform(Eigen::Quaterniond::Identity(), t);
  }

  const Eigen::Quaterniond& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }
  Eigen::Matrix3d rotation_matrix() const { return rotation_.toRotationMatrix(); }
  Eigen::Matrix4d matrix() const;

  // Upper 3x4 column-major (three rotation columns then translation),
  // the layout TRANSFORM bodies carry.
  std::array<float, 12> to_columns34() const;
  static RigidTransform from_columns34(const std::array<float, 12>& columns);

 private:
  Eigen::Quaterniond rotation_;
  Eigen::Vector3d translation_;
};

RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform invert(const RigidTransform& t);
Eigen::Vector3d apply(const RigidTransform& t, const Eigen::Vector3d& p);

// Linear translation interpolation plus shorter-arc slerp; s outside
// [0,1] is clamped, and the endpoints are returned exactly.
RigidTransform interpolate_pose(const RigidTransform& a, const RigidTransform& b, double s);

// Geodesic rotation angle between two transforms, radians in [0, pi].
double rotation_angle(const RigidTransform& a, const RigidTransform& b);
double translation_distance(const RigidTransform& a, const RigidTransform& b);

inline RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
  return compose(a, b);
}

bool approx_equal(const RigidTransform& a, const RigidTransform& b, double tol_mm,
                  double tol_rad);

}  // namespace rtms::math
