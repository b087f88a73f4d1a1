#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>

#include "rtms/igtl/message.hpp"
#include "rtms/math/estimation.hpp"
#include "rtms/scene/transform_tree.hpp"
#include "rtms/sim/robot.hpp"
#include "rtms/sim/world.hpp"

namespace rtms::workflow {

enum class Phase { idle, calibration, registration, navigation };

const char* to_string(Phase phase);

struct EngineConfig {
  std::string base_frame = "robot_base";
  std::string flange_frame = "flange";
  std::string coil_tag_frame = "coil_tag";
  std::string coil_frame = "coil";
  std::string head_frame = "head";
  std::string stylus_frame = "stylus";
  double position_tolerance_mm = 0.5;
  double angle_tolerance_rad = 0.01;
};

struct CalibrationState {
  std::optional<math::PivotResult> pivot;
  std::optional<math::RigidTransform> world_base;  // W_T_B
  bool complete() const { return pivot && world_base; }
};

struct RegistrationState {
  std::vector<math::Fiducial> collected;  // tip positions in H
  std::optional<math::FiducialSet> image_fiducials;
  std::optional<math::RegistrationResult> result;  // H_T_I
};

// The integration-layer pipeline: consumes transport messages, tracker
// observations and timer ticks, runs the calibration / registration /
// navigation workflow, and emits OpenIGTLink messages plus robot pose
// commands. Single logical event loop: all calls must come from one
// thread.
class WorkflowEngine {
 public:
  using MessageSink = std::function<void(const igtl::IgtlMessage&)>;
  using RobotSink = std::function<void(const math::RigidTransform&)>;

  WorkflowEngine(scene::TransformTree& tree, EngineConfig config, MessageSink message_sink,
                 RobotSink robot_sink);

  Phase phase() const { return phase_; }

  // Transport feed: commands on RTMS_STATUS_CMD, targets on
  // RTMS_TF_TARGET, image fiducials on RTMS_FID_IMAGE. Every command
  // yields exactly one STATUS reply.
  void handle_message(const igtl::IgtlMessage& message);

  // Tracker feed. Ignored while Idle. Tag poses update the matching
  // floating frames; unknown tags are counted and reported once.
  void ingest_observation(std::span<const sim::Observation> observations, double t);

  // Robot state feed (the controller's view of the plant).
  void ingest_robot_state(const math::RigidTransform& base_flange,
                          sim::RobotStatus status, double t);

  // Timer feed: computes the desired flange pose from the live head
  // pose and issues the robot command. Call at the scene sync rate.
  void navigation_step(double now);

  // Introspection
  const CalibrationState& calibration() const { return calibration_; }
  const RegistrationState& registration() const { return registration_; }
  const std::optional<math::RigidTransform>& target() const { return target_; }
  uint64_t unknown_tag_warnings() const { return unknown_tag_warnings_; }
  const math::RigidTransform& flange_coil() const { return flange_coil_; }
  const math::RigidTransform& flange_tag() const { return flange_tag_; }

  struct Telemetry {
    bool valid = false;
    double time = 0.0;
    math::RigidTransform desired_coil_world;
    math::RigidTransform desired_flange_world;
    math::RigidTransform desired_flange_base;
    double position_error_mm = 0.0;  // desired vs current coil pose
    double angle_error_rad = 0.0;
  };
  const Telemetry& telemetry() const { return telemetry_; }

 private:
  struct ObservationCache {
    double time = 0.0;
    std::optional<math::RigidTransform> head;
    std::optional<math::RigidTransform> stylus;
    std::optional<math::RigidTransform> coil_tag;
  };

  void handle_command(const igtl::StatusBody& command);
  void handle_target(const igtl::IgtlMessage& message);
  void handle_image_fiducials(const igtl::IgtlMessage& message);

  void start_phase(Phase to, const std::string& device);
  bool transition_allowed(Phase to) const;
  void abort_to_idle();

  void collect_fiducial(const std::string& label);
  void solve_registration();
  void finish_pivot();
  void finish_anchor();

  void update_floating_frame(const std::string& frame_id,
                             const math::RigidTransform& world_pose);

  void reply_ok(const std::string& device, const std::string& text);
  void reply_error(const std::string& device, const std::string& error_name,
                   const std::string& text);
  void emit(const igtl::IgtlMessage& message);

  scene::TransformTree& tree_;
  EngineConfig config_;
  MessageSink message_sink_;
  RobotSink robot_sink_;

  math::RigidTransform flange_coil_;  // F_T_C, from the URDF chain
  math::RigidTransform flange_tag_;   // F_T_tag, from the URDF chain

  Phase phase_ = Phase::idle;
  CalibrationState calibration_;
  RegistrationState registration_;
  std::optional<math::RigidTransform> target_;  // I_T_target

  struct Collection {
    bool active = false;
    std::size_t needed = 0;
    std::vector<math::RigidTransform> poses;        // pivot
    std::vector<math::AnchorSample> anchor_samples; // anchor
  };
  Collection pivot_collection_;
  Collection anchor_collection_;

  ObservationCache latest_;
  std::optional<math::RigidTransform> robot_flange_;  // B_T_F
  sim::RobotStatus robot_status_ = sim::RobotStatus::idle;

  uint64_t unknown_tag_warnings_ = 0;
  std::unordered_set<std::string> reported_unknown_tags_;
  bool nav_fail_latched_ = false;
  double last_time_ = 0.0;
  Telemetry telemetry_;
};

}  // namespace rtms::workflow
