#include "rtms/sim/world.hpp"

namespace rtms::sim {

NoiseStream::NoiseStream(const NoiseModel& model) : model_(model), rng_(model.seed) {}

math::RigidTransform NoiseStream::perturb(const math::RigidTransform& pose) {
  if (model_.sigma_translation_mm <= 0 && model_.sigma_rotation_rad <= 0) {
    return pose;
  }
  Eigen::Vector3d dt(gauss_(rng_), gauss_(rng_), gauss_(rng_));
  dt *= model_.sigma_translation_mm;

  Eigen::Vector3d axis(gauss_(rng_), gauss_(rng_), gauss_(rng_));
  double norm = axis.norm();
  axis = norm > 0 ? Eigen::Vector3d(axis / norm) : Eigen::Vector3d::UnitZ();
  double angle = std::abs(gauss_(rng_)) * model_.sigma_rotation_rad;

  Eigen::Quaterniond dq(Eigen::AngleAxisd(angle, axis));
  return math::RigidTransform(dq * pose.rotation(), pose.translation() + dt);
}

SimWorld::SimWorld(ScenarioConfig config)
    : config_(std::move(config)), noise_(config_.noise) {}

math::RigidTransform SimWorld::head_pose(double t) const {
  return config_.head_motion.pose_at(t);
}

const math::RigidTransform& SimWorld::base_pose() const {
  return config_.base_pose;
}

math::RigidTransform SimWorld::coil_tag_pose(
    const math::RigidTransform& base_flange) const {
  return config_.base_pose * base_flange * config_.flange_tag;
}

Eigen::Vector3d SimWorld::fiducial_world(const std::string& label, double t) const {
  for (const auto& f : config_.fiducials) {
    if (f.label == label) {
      return apply(head_pose(t), f.position);
    }
  }
  throw ScenarioError("unknown fiducial label \"" + label + "\"");
}

void SimWorld::stylus_park() {
  stylus_mode_ = StylusMode::parked;
}

void SimWorld::stylus_pivot_sweep() {
  stylus_mode_ = StylusMode::pivot_sweep;
}

void SimWorld::stylus_touch(const std::string& fiducial_label) {
  fiducial_world(fiducial_label, 0.0);  // label check
  touched_label_ = fiducial_label;
  stylus_mode_ = StylusMode::touching;
}

math::RigidTransform SimWorld::stylus_pose(double t) const {
  switch (stylus_mode_) {
    case StylusMode::parked:
      return config_.stylus_park;
    case StylusMode::pivot_sweep: {
      // Smooth orientation sweep with incommensurate rates about two
      // axes; pure function of t so stepping stays partition-invariant.
      Eigen::Quaterniond q =
          Eigen::Quaterniond(Eigen::AngleAxisd(0.9 * t, Eigen::Vector3d::UnitX())) *
          Eigen::Quaterniond(Eigen::AngleAxisd(1.3 * t, Eigen::Vector3d::UnitY())) *
          Eigen::Quaterniond(Eigen::AngleAxisd(0.7 * t, Eigen::Vector3d::UnitZ()));
      Eigen::Vector3d translation =
          config_.stylus_pivot_point - q * config_.stylus_tip_offset;
      return math::RigidTransform(q, translation);
    }
    case StylusMode::touching: {
      Eigen::Vector3d tip = fiducial_world(touched_label_, t);
      const Eigen::Quaterniond& q = config_.stylus_park.rotation();
      return math::RigidTransform(q, tip - q * config_.stylus_tip_offset);
    }
  }
  return config_.stylus_park;
}

Eigen::Vector3d SimWorld::stylus_tip_world(double t) const {
  return apply(stylus_pose(t), config_.stylus_tip_offset);
}

bool SimWorld::occluded(const std::string& tag_id, double t) const {
  for (const auto& w : config_.occlusions) {
    if (w.tag_id == tag_id && t >= w.begin && t <= w.end) {
      return true;
    }
  }
  return false;
}

std::vector<Observation> SimWorld::observe(double t,
                                           const math::RigidTransform& base_flange) {
  std::vector<Observation> out;
  if (!occluded(kTagHead, t)) {
    out.push_back({kTagHead, noise_.perturb(head_pose(t))});
  }
  if (!occluded(kTagStylus, t)) {
    out.push_back({kTagStylus, noise_.perturb(stylus_pose(t))});
  }
  if (!occluded(kTagCoil, t)) {
    out.push_back({kTagCoil, noise_.perturb(coil_tag_pose(base_flange))});
  }
  return out;
}

}  // namespace rtms::sim
