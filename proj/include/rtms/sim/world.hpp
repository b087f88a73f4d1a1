#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rtms/sim/scenario.hpp"

namespace rtms::sim {

// Fixed tag identifiers; they double as the scene frame ids the
// workflow engine updates.
inline constexpr const char* kTagHead = "head";
inline constexpr const char* kTagStylus = "stylus";
inline constexpr const char* kTagCoil = "coil_tag";

struct Observation {
  std::string tag_id;
  math::RigidTransform pose;  // W_T_tag
};

// Seeded perturbation stream for tracker observations. Identical seeds
// reproduce identical streams; zero sigmas leave poses untouched and
// consume no randomness.
class NoiseStream {
 public:
  explicit NoiseStream(const NoiseModel& model);
  math::RigidTransform perturb(const math::RigidTransform& pose);

 private:
  NoiseModel model_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

// Ground-truth world of the simulated physical layer: an optical
// tracker observing the head, stylus, and flange-mounted tags, a head
// following its motion profile, and a scriptable stylus that either
// parks, sweeps orientations about a fixed pivot, or holds its tip on a
// phantom fiducial.
class SimWorld {
 public:
  explicit SimWorld(ScenarioConfig config);

  const ScenarioConfig& config() const { return config_; }

  // Ground truth (no noise).
  math::RigidTransform head_pose(double t) const;         // W_T_H
  const math::RigidTransform& base_pose() const;          // W_T_B
  math::RigidTransform stylus_pose(double t) const;       // W_T_S
  math::RigidTransform coil_tag_pose(const math::RigidTransform& base_flange) const;
  Eigen::Vector3d fiducial_world(const std::string& label, double t) const;
  Eigen::Vector3d stylus_tip_world(double t) const;

  enum class StylusMode { parked, pivot_sweep, touching };
  void stylus_park();
  void stylus_pivot_sweep();
  void stylus_touch(const std::string& fiducial_label);  // throws on unknown label
  StylusMode stylus_mode() const { return stylus_mode_; }

  bool occluded(const std::string& tag_id, double t) const;

  // Noisy observation batch at time t; occluded tags are omitted. The
  // caller's clock drives the cadence (30 Hz by default).
  std::vector<Observation> observe(double t, const math::RigidTransform& base_flange);

 private:
  ScenarioConfig config_;
  NoiseStream noise_;
  StylusMode stylus_mode_ = StylusMode::parked;
  std::string touched_label_;
};

}  // namespace rtms::sim
