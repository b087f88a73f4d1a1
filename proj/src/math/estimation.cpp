#include "rtms/math/estimation.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace rtms::math {

const Fiducial* FiducialSet::find(const std::string& label) const {
  for (const auto& f : points) {
    if (f.label == label) return &f;
  }
  return nullptr;
}

bool FiducialSet::labels_unique() const {
  std::unordered_set<std::string> seen;
  for (const auto& f : points) {
    if (!seen.insert(f.label).second) return false;
  }
  return true;
}

RegistrationResult register_paired_points(const FiducialSet& moving,
                                          const FiducialSet& fixed) {
  if (!moving.labels_unique() || !fixed.labels_unique()) {
    throw EstimationError(EstimationErrc::duplicate_label,
                          "fiducial labels must be unique within a set");
  }
  if (moving.points.size() != fixed.points.size()) {
    throw EstimationError(EstimationErrc::label_mismatch,
                          "fiducial sets differ in size: " +
                              std::to_string(moving.points.size()) + " vs " +
                              std::to_string(fixed.points.size()));
  }
  const std::size_t n = moving.points.size();
  if (n < 3) {
    throw EstimationError(EstimationErrc::insufficient_fiducials,
                          "registration needs at least 3 fiducials, got " +
                              std::to_string(n));
  }

  std::vector<Eigen::Vector3d> p(n), q(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Fiducial* match = fixed.find(moving.points[i].label);
    if (!match) {
      throw EstimationError(EstimationErrc::label_mismatch,
                            "fixed set has no fiducial labeled \"" +
                                moving.points[i].label + "\"");
    }
    p[i] = moving.points[i].position;
    q[i] = match->position;
  }

  Eigen::Vector3d p_centroid = Eigen::Vector3d::Zero();
  Eigen::Vector3d q_centroid = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    p_centroid += p[i];
    q_centroid += q[i];
  }
  p_centroid /= static_cast<double>(n);
  q_centroid /= static_cast<double>(n);

  Eigen::Matrix3d cross = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    cross += (p[i] - p_centroid) * (q[i] - q_centroid).transpose();
  }

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cross,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d& sigma = svd.singularValues();
  if (sigma(1) < 1e-9 * sigma(0)) {
    throw EstimationError(EstimationErrc::degenerate_configuration,
                          "fiducials are collinear within tolerance");
  }

  Eigen::Matrix3d u = svd.matrixU();
  Eigen::Matrix3d v = svd.matrixV();
  Eigen::Vector3d correction(1.0, 1.0, (v * u.transpose()).determinant() < 0 ? -1.0 : 1.0);
  Eigen::Matrix3d rotation = v * correction.asDiagonal() * u.transpose();
  Eigen::Vector3d translation = q_centroid - rotation * p_centroid;

  RegistrationResult result;
  result.transform = RigidTransform::from_rotation_matrix(rotation, translation);
  result.per_point_residuals.resize(n);
  double sq_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = (apply(result.transform, p[i]) - q[i]).norm();
    result.per_point_residuals[i] = r;
    sq_sum += r * r;
  }
  result.fre_rms = std::sqrt(sq_sum / static_cast<double>(n));
  return result;
}

PivotResult pivot_calibrate(std::span<const RigidTransform> tag_poses) {
  const std::size_t n = tag_poses.size();
  if (n < 3) {
    throw EstimationError(EstimationErrc::insufficient_samples,
                          "pivot calibration needs at least 3 poses, got " +
                              std::to_string(n));
  }

  Eigen::MatrixXd a(3 * n, 6);
  Eigen::VectorXd b(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Matrix3d r = tag_poses[i].rotation_matrix();
    a.block<3, 3>(static_cast<Eigen::Index>(3 * i), 0) = r;
    a.block<3, 3>(static_cast<Eigen::Index>(3 * i), 3) = -Eigen::Matrix3d::Identity();
    b.segment<3>(static_cast<Eigen::Index>(3 * i)) = -tag_poses[i].translation();
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double smax = svd.singularValues()(0);
  double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (smin <= 0 || smax / smin > 1e8) {
    throw EstimationError(EstimationErrc::insufficient_rotation_diversity,
                          "stacked pivot system is rank deficient; sweep the stylus "
                          "through more orientations");
  }

  Eigen::VectorXd x = svd.solve(b);
  PivotResult result;
  result.tip_offset = x.head<3>();
  result.pivot_point = x.tail<3>();
  result.residual_rms =
      std::sqrt((a * x - b).squaredNorm() / static_cast<double>(3 * n));
  return result;
}

RigidTransform anchor_base(std::span<const AnchorSample> samples,
                           const RigidTransform& flange_tag) {
  if (samples.empty()) {
    throw EstimationError(EstimationErrc::insufficient_samples,
                          "base anchoring needs at least one sample");
  }

  RigidTransform tag_flange = invert(flange_tag);
  std::vector<RigidTransform> estimates;
  estimates.reserve(samples.size());
  for (const auto& s : samples) {
    estimates.push_back(s.world_tag * tag_flange * invert(s.base_flange));
  }

  // Rotation average: dominant eigenvector of the quaternion
  // outer-product sum (sign-invariant).
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  Eigen::Vector3d t_mean = Eigen::Vector3d::Zero();
  for (const auto& e : estimates) {
    Eigen::Vector4d q(e.rotation().w(), e.rotation().x(), e.rotation().y(),
                      e.rotation().z());
    m += q * q.transpose();
    t_mean += e.translation();
  }
  t_mean /= static_cast<double>(estimates.size());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(m);
  Eigen::Vector4d q_mean = eig.eigenvectors().col(3);  // largest eigenvalue
  RigidTransform mean(Eigen::Quaterniond(q_mean(0), q_mean(1), q_mean(2), q_mean(3)),
                      t_mean);

  for (std::size_t i = 0; i < estimates.size(); ++i) {
    double dt = translation_distance(estimates[i], mean);
    double da = rotation_angle(estimates[i], mean);
    if (dt > kAnchorMaxTranslationSpreadMm || da > kAnchorMaxRotationSpreadRad) {
      throw EstimationError(
          EstimationErrc::inconsistent_samples,
          "base estimates disagree (sample " + std::to_string(i) + " deviates " +
              std::to_string(dt) + " mm / " + std::to_string(da) +
              " rad); check the flange tag transform");
    }
  }
  return mean;
}

double target_registration_error(const RegistrationResult& result,
                                 const RigidTransform& truth,
                                 const Eigen::Vector3d& target) {
  return (apply(result.transform, target) - apply(truth, target)).norm();
}

}  // namespace rtms::math
