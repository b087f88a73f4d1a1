#pragma once

#include <string>

#include "rtms/sim/scenario.hpp"
#include "rtms/sim/world.hpp"

namespace rtms::sim {

enum class RobotStatus { idle, moving, converged, fault };

const char* to_string(RobotStatus status);

// Cartesian pose servo standing in for the manipulator: each step moves
// the flange along the straight line / shorter-arc geodesic toward the
// commanded pose, clamped by the speed limits. Commands outside the
// workspace box fault without moving.
class SimRobot {
 public:
  SimRobot(const math::RigidTransform& initial_flange, RobotLimits limits);

  RobotStatus status() const { return status_; }
  const math::RigidTransform& flange_pose() const { return flange_; }  // B_T_F
  const math::RigidTransform& commanded_pose() const { return commanded_; }
  const std::string& fault_reason() const { return fault_reason_; }
  const RobotLimits& limits() const { return limits_; }

  void command(const math::RigidTransform& target);
  void step(double dt);  // dt > 0 seconds

 private:
  bool within_tolerance() const;
  void refresh_status();

  math::RigidTransform flange_;
  math::RigidTransform commanded_;
  RobotLimits limits_;
  RobotStatus status_ = RobotStatus::idle;
  std::string fault_reason_;
};

// Bundles the world, the robot, and the simulated clock; fixed-step
// integration so runs never depend on wall time.
class Simulation {
 public:
  explicit Simulation(ScenarioConfig config)
      : world_(config), robot_(config.robot_initial_flange, config.robot) {}

  SimWorld& world() { return world_; }
  SimRobot& robot() { return robot_; }
  double time() const { return time_; }

  void step(double dt) {
    time_ += dt;
    robot_.step(dt);
  }

  std::vector<Observation> observe() {
    return world_.observe(time_, robot_.flange_pose());
  }

 private:
  SimWorld world_;
  SimRobot robot_;
  double time_ = 0.0;
};

}  // namespace rtms::sim
