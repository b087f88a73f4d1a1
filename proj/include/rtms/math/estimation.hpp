#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtms/math/rigid_transform.hpp"

namespace rtms::math {

struct Fiducial {
  std::string label;
  Eigen::Vector3d position;  // mm
};

// Labeled 3D points expressed in a named frame.
struct FiducialSet {
  std::string frame_id;
  std::vector<Fiducial> points;

  const Fiducial* find(const std::string& label) const;
  bool labels_unique() const;
};

struct RegistrationResult {
  RigidTransform transform;  // maps the moving frame into the fixed frame
  double fre_rms = 0.0;      // mm
  std::vector<double> per_point_residuals;  // mm, moving-set point order
};

struct PivotResult {
  Eigen::Vector3d tip_offset;    // mm, in the tracked-tag frame
  Eigen::Vector3d pivot_point;   // mm, in the tracker frame
  double residual_rms = 0.0;     // mm
};

enum class EstimationErrc {
  insufficient_fiducials,
  degenerate_configuration,
  label_mismatch,
  duplicate_label,
  insufficient_samples,
  insufficient_rotation_diversity,
  inconsistent_samples,
};

class EstimationError : public std::runtime_error {
 public:
  EstimationError(EstimationErrc code, std::string what)
      : std::runtime_error(std::move(what)), code_(code) {}
  EstimationErrc code() const { return code_; }

 private:
  EstimationErrc code_;
};

// Least-squares rigid paired-point registration (Kabsch/Umeyama, no
// scale): rotation from the SVD of the cross-covariance with determinant
// correction, translation from the centroids. Points are paired by
// label; the result maps the moving frame into the fixed frame, and the
// FRE is computed from the inputs.
RegistrationResult register_paired_points(const FiducialSet& moving,
                                          const FiducialSet& fixed);

// Tip offset and pivot point of a tracked stylus rotated about a fixed
// tip. Each pose maps the stylus-tag frame into the tracker frame;
// stacking R_i * tip - pivot = -t_i gives a 3n x 6 linear system solved
// in the least-squares sense.
PivotResult pivot_calibrate(std::span<const RigidTransform> tag_poses);

struct AnchorSample {
  RigidTransform world_tag;    // W_T_tag, observed
  RigidTransform base_flange;  // B_T_F, from robot state
};

// Robot base pose in the tracker frame from flange-tag observations:
// per-sample W_T_B_i = W_T_tag_i * inv(F_T_tag) * inv(B_T_F_i), then
// quaternion outer-product eigen averaging for rotation and arithmetic
// averaging for translation. Samples spread beyond 10 mm / 5 degrees
// signal a mis-configured flange tag and are rejected.
RigidTransform anchor_base(std::span<const AnchorSample> samples,
                           const RigidTransform& flange_tag);

inline constexpr double kAnchorMaxTranslationSpreadMm = 10.0;
inline constexpr double kAnchorMaxRotationSpreadRad = 5.0 * EIGEN_PI / 180.0;

// Displacement at `target` implied by a registration versus the true
// transform. Ground truth exists only in simulation.
double target_registration_error(const RegistrationResult& result,
                                 const RigidTransform& truth,
                                 const Eigen::Vector3d& target);

}  // namespace rtms::math
