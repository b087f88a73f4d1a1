#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtms/math/estimation.hpp"
#include "rtms/math/rigid_transform.hpp"

namespace rtms::sim {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Seeded observation noise: isotropic Gaussian translation, and a
// rotation perturbation with uniformly distributed axis and
// half-normal angle.
struct NoiseModel {
  double sigma_translation_mm = 0.0;
  double sigma_rotation_rad = 0.0;
  uint64_t seed = 0;
};

// Piecewise pose script over time. Keyframes interpolate (translation
// linearly, rotation along the shorter arc) unless marked as steps,
// which hold the previous pose until their time and then jump.
struct MotionProfile {
  struct Keyframe {
    double time = 0.0;
    math::RigidTransform pose;
    bool step = false;
  };
  std::vector<Keyframe> keyframes;

  math::RigidTransform pose_at(double t) const;
};

struct RobotLimits {
  double max_linear_mm_s = 100.0;
  double max_angular_rad_s = 1.0;
  Eigen::Vector3d workspace_min{-1000.0, -1000.0, -1000.0};
  Eigen::Vector3d workspace_max{1000.0, 1000.0, 1000.0};
  double position_tolerance_mm = 0.5;
  double angle_tolerance_rad = 0.01;
};

struct OcclusionWindow {
  std::string tag_id;
  double begin = 0.0;
  double end = 0.0;
};

// Ground truth for one simulated session: tag poses in the tracker
// frame W, phantom fiducials rigid in the head frame H, the image-space
// pose H_T_I, stylus geometry, robot limits, noise, and seeds.
struct ScenarioConfig {
  uint64_t seed = 0;
  double tracker_rate_hz = 30.0;
  double sync_rate_hz = 30.0;
  NoiseModel noise;

  math::RigidTransform base_pose;   // W_T_B
  math::RigidTransform image_pose;  // H_T_I
  MotionProfile head_motion;        // W_T_H(t)
  std::vector<math::Fiducial> fiducials;  // in H

  Eigen::Vector3d stylus_tip_offset{0.0, 0.0, -100.0};  // in the stylus-tag frame
  Eigen::Vector3d stylus_pivot_point{0.0, 0.0, 0.0};    // in W
  math::RigidTransform stylus_park;
  math::RigidTransform flange_tag;  // F_T_tag

  math::RigidTransform robot_initial_flange;  // B_T_F at t = 0
  RobotLimits robot;

  std::vector<OcclusionWindow> occlusions;
};

// Plain key=value scenario file; see the README for the schema.
ScenarioConfig load_scenario(const std::filesystem::path& path);
ScenarioConfig parse_scenario(const std::string& text, const std::string& origin = "");

}  // namespace rtms::sim
