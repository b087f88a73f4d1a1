#include "rtms/sim/robot.hpp"

namespace rtms::sim {

const char* to_string(RobotStatus status) {
  switch (status) {
    case RobotStatus::idle: return "idle";
    case RobotStatus::moving: return "moving";
    case RobotStatus::converged: return "converged";
    case RobotStatus::fault: return "fault";
  }
  return "unknown";
}

SimRobot::SimRobot(const math::RigidTransform& initial_flange, RobotLimits limits)
    : flange_(initial_flange), commanded_(initial_flange), limits_(std::move(limits)) {}

bool SimRobot::within_tolerance() const {
  return translation_distance(flange_, commanded_) <= limits_.position_tolerance_mm &&
         rotation_angle(flange_, commanded_) <= limits_.angle_tolerance_rad;
}

void SimRobot::command(const math::RigidTransform& target) {
  const Eigen::Vector3d& p = target.translation();
  if ((p.array() < limits_.workspace_min.array()).any() ||
      (p.array() > limits_.workspace_max.array()).any()) {
    status_ = RobotStatus::fault;
    fault_reason_ = "commanded pose outside workspace";
    return;
  }
  commanded_ = target;
  fault_reason_.clear();
  status_ = within_tolerance() ? RobotStatus::converged : RobotStatus::moving;
}

void SimRobot::step(double dt) {
  if (dt <= 0 || status_ == RobotStatus::fault || status_ == RobotStatus::idle) {
    return;
  }
  double lin_dist = translation_distance(flange_, commanded_);
  double ang_dist = rotation_angle(flange_, commanded_);
  if (lin_dist > 0 || ang_dist > 0) {
    double s = 1.0;
    double lin_step = limits_.max_linear_mm_s * dt;
    double ang_step = limits_.max_angular_rad_s * dt;
    if (lin_dist > lin_step) {
      s = std::min(s, lin_step / lin_dist);
    }
    if (ang_dist > ang_step) {
      s = std::min(s, ang_step / ang_dist);
    }
    flange_ = interpolate_pose(flange_, commanded_, s);
  }
  refresh_status();
}

void SimRobot::refresh_status() {
  status_ = within_tolerance() ? RobotStatus::converged : RobotStatus::moving;
}

}  // namespace rtms::sim
