#include "rtms/workflow/engine.hpp"

#include <sstream>

#include "rtms/devices.hpp"

namespace rtms::workflow {

namespace {

std::string format_mm(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

bool same_pose(const math::RigidTransform& a, const math::RigidTransform& b) {
  return a.translation() == b.translation() &&
         a.rotation().coeffs() == b.rotation().coeffs();
}

}  // namespace

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::idle: return "Idle";
    case Phase::calibration: return "Calibration";
    case Phase::registration: return "Registration";
    case Phase::navigation: return "Navigation";
  }
  return "unknown";
}

WorkflowEngine::WorkflowEngine(scene::TransformTree& tree, EngineConfig config,
                               MessageSink message_sink, RobotSink robot_sink)
    : tree_(tree),
      config_(std::move(config)),
      message_sink_(std::move(message_sink)),
      robot_sink_(std::move(robot_sink)) {
  for (const auto& frame :
       {config_.base_frame, config_.flange_frame, config_.coil_tag_frame,
        config_.coil_frame, config_.head_frame, config_.stylus_frame}) {
    if (!tree_.has_frame(frame)) {
      throw scene::SceneError(scene::SceneErrc::unknown_frame,
                              "workflow frame \"" + frame + "\" missing from the scene");
    }
  }
  // Rigid mounts below the flange come from the URDF, not estimation.
  flange_coil_ = tree_.relative_transform(config_.flange_frame, config_.coil_frame);
  flange_tag_ = tree_.relative_transform(config_.flange_frame, config_.coil_tag_frame);
}

void WorkflowEngine::emit(const igtl::IgtlMessage& message) {
  if (message_sink_) {
    message_sink_(message);
  }
}

void WorkflowEngine::reply_ok(const std::string& device, const std::string& text) {
  igtl::StatusBody body;
  body.code = igtl::kStatusOk;
  body.message = text;
  emit(igtl::make_status(device, std::move(body), igtl::Timestamp::from_seconds(last_time_)));
}

void WorkflowEngine::reply_error(const std::string& device, const std::string& error_name,
                                 const std::string& text) {
  igtl::StatusBody body;
  body.code = igtl::kStatusError;
  body.error_name = error_name;
  body.message = text;
  emit(igtl::make_status(device, std::move(body), igtl::Timestamp::from_seconds(last_time_)));
}

void WorkflowEngine::handle_message(const igtl::IgtlMessage& message) {
  const std::string& device = message.header.device_name;
  if (device == devices::kCommand && message.is<igtl::StatusBody>()) {
    handle_command(message.get<igtl::StatusBody>());
  } else if (device == devices::kTarget && message.is<igtl::TransformBody>()) {
    handle_target(message);
  } else if (device == devices::kImageFiducials && message.is<igtl::PolyDataBody>()) {
    handle_image_fiducials(message);
  }
  // Other devices are not for the engine; the transport may carry them.
}

bool WorkflowEngine::transition_allowed(Phase to) const {
  if (to == Phase::idle) {
    return true;
  }
  switch (to) {
    case Phase::calibration:
      return phase_ == Phase::idle;
    case Phase::registration:
      return phase_ == Phase::calibration && calibration_.complete();
    case Phase::navigation:
      return phase_ == Phase::registration && registration_.result.has_value();
    default:
      return false;
  }
}

void WorkflowEngine::start_phase(Phase to, const std::string& device) {
  if (!transition_allowed(to)) {
    reply_error(device, "PHASE",
                std::string("cannot enter ") + to_string(to) + " from " +
                    to_string(phase_));
    return;
  }
  phase_ = to;
  reply_ok(device, std::string("phase ") + to_string(to));
}

void WorkflowEngine::abort_to_idle() {
  phase_ = Phase::idle;
  pivot_collection_ = {};
  anchor_collection_ = {};
  target_.reset();
  nav_fail_latched_ = false;
  telemetry_.valid = false;
  if (robot_flange_ && robot_sink_) {
    robot_sink_(*robot_flange_);  // freeze at the current pose
  }
  reply_ok(devices::kController, "aborted; robot frozen");
}

void WorkflowEngine::handle_command(const igtl::StatusBody& command) {
  std::istringstream in(command.message);
  std::string verb;
  in >> verb;

  if (verb == "START_CALIB") {
    start_phase(Phase::calibration, devices::kCalibrator);
  } else if (verb == "START_REG") {
    start_phase(Phase::registration, devices::kRegister);
  } else if (verb == "START_NAV") {
    start_phase(Phase::navigation, devices::kTracker);
  } else if (verb == "ABORT") {
    abort_to_idle();
  } else if (verb == "CALIB_PIVOT") {
    std::size_t n = 0;
    in >> n;
    if (phase_ != Phase::calibration) {
      reply_error(devices::kCalibrator, "PHASE", "CALIB_PIVOT requires Calibration");
    } else if (n == 0) {
      reply_error(devices::kCalibrator, "CALIB_FAIL", "sample count missing");
    } else {
      pivot_collection_ = {};
      pivot_collection_.active = true;
      pivot_collection_.needed = n;
      reply_ok(devices::kCalibrator,
               "collecting " + std::to_string(n) + " stylus samples");
    }
  } else if (verb == "CALIB_BASE") {
    std::size_t n = 0;
    in >> n;
    if (phase_ != Phase::calibration) {
      reply_error(devices::kCalibrator, "PHASE", "CALIB_BASE requires Calibration");
    } else if (n == 0) {
      reply_error(devices::kCalibrator, "CALIB_FAIL", "sample count missing");
    } else {
      anchor_collection_ = {};
      anchor_collection_.active = true;
      anchor_collection_.needed = n;
      reply_ok(devices::kCalibrator,
               "collecting " + std::to_string(n) + " flange tag samples");
    }
  } else if (verb == "COLLECT") {
    std::string label;
    in >> label;
    collect_fiducial(label);
  } else if (verb == "SOLVE_REG") {
    solve_registration();
  } else {
    reply_error(devices::kTracker, "UNKNOWN_CMD", "unknown command \"" + verb + "\"");
  }
}

void WorkflowEngine::handle_target(const igtl::IgtlMessage& message) {
  if (phase_ != Phase::navigation) {
    reply_error(devices::kTracker, "PHASE", "targets require Navigation");
    return;
  }
  const auto& body = message.get<igtl::TransformBody>();
  if (!body.rotation_orthonormal) {
    reply_error(devices::kTracker, "TARGET", "target rotation is not orthonormal");
    return;
  }
  target_ = math::RigidTransform::from_columns34(body.matrix);
  nav_fail_latched_ = false;
  reply_ok(devices::kTracker, "target set");
}

void WorkflowEngine::handle_image_fiducials(const igtl::IgtlMessage& message) {
  const auto& body = message.get<igtl::PolyDataBody>();
  math::FiducialSet set;
  set.frame_id = "image";
  for (std::size_t i = 0; i < body.points.size(); ++i) {
    set.points.push_back({"F" + std::to_string(i + 1),
                          Eigen::Vector3d(body.points[i][0], body.points[i][1],
                                          body.points[i][2])});
  }
  registration_.image_fiducials = std::move(set);
  reply_ok(devices::kRegister,
           "image fiducials received: " + std::to_string(body.points.size()));
}

void WorkflowEngine::update_floating_frame(const std::string& frame_id,
                                           const math::RigidTransform& world_pose) {
  const auto& parent = tree_.node(frame_id).parent_id;
  math::RigidTransform local =
      parent.empty() ? world_pose
                     : compose(invert(tree_.world_transform(parent)), world_pose);
  if (!same_pose(tree_.node(frame_id).local, local)) {
    tree_.set_local_transform(frame_id, local);
  }
}

void WorkflowEngine::ingest_observation(std::span<const sim::Observation> observations,
                                        double t) {
  if (phase_ == Phase::idle) {
    return;
  }
  last_time_ = t;
  latest_ = {};
  latest_.time = t;
  for (const auto& obs : observations) {
    if (obs.tag_id == config_.head_frame) {
      latest_.head = obs.pose;
      update_floating_frame(config_.head_frame, obs.pose);
    } else if (obs.tag_id == config_.stylus_frame) {
      latest_.stylus = obs.pose;
      update_floating_frame(config_.stylus_frame, obs.pose);
    } else if (obs.tag_id == config_.coil_tag_frame) {
      latest_.coil_tag = obs.pose;  // kinematic in the scene; used for anchoring
    } else {
      ++unknown_tag_warnings_;
      if (reported_unknown_tags_.insert(obs.tag_id).second) {
        reply_error(devices::kDetector, "UNKNOWN_TAG",
                    "ignoring unknown tag \"" + obs.tag_id + "\"");
      }
      continue;
    }
  }

  if (pivot_collection_.active && latest_.stylus) {
    pivot_collection_.poses.push_back(*latest_.stylus);
    if (pivot_collection_.poses.size() >= pivot_collection_.needed) {
      finish_pivot();
    }
  }
  if (anchor_collection_.active && latest_.coil_tag && robot_flange_) {
    anchor_collection_.anchor_samples.push_back({*latest_.coil_tag, *robot_flange_});
    if (anchor_collection_.anchor_samples.size() >= anchor_collection_.needed) {
      finish_anchor();
    }
  }
}

void WorkflowEngine::finish_pivot() {
  pivot_collection_.active = false;
  try {
    calibration_.pivot = math::pivot_calibrate(pivot_collection_.poses);
    reply_ok(devices::kCalibrator,
             "pivot calibration ok; residual_rms=" +
                 format_mm(calibration_.pivot->residual_rms) + " mm over " +
                 std::to_string(pivot_collection_.poses.size()) + " poses");
  } catch (const math::EstimationError& e) {
    reply_error(devices::kCalibrator, "CALIB_FAIL", e.what());
  }
  pivot_collection_.poses.clear();
}

void WorkflowEngine::finish_anchor() {
  anchor_collection_.active = false;
  try {
    calibration_.world_base =
        math::anchor_base(anchor_collection_.anchor_samples, flange_tag_);
    update_floating_frame(config_.base_frame, *calibration_.world_base);
    reply_ok(devices::kCalibrator,
             "base anchored from " +
                 std::to_string(anchor_collection_.anchor_samples.size()) + " samples");
  } catch (const math::EstimationError& e) {
    reply_error(devices::kCalibrator, "CALIB_FAIL", e.what());
  }
  anchor_collection_.anchor_samples.clear();
}

void WorkflowEngine::collect_fiducial(const std::string& label) {
  if (phase_ != Phase::registration) {
    reply_error(devices::kRegister, "PHASE", "COLLECT requires Registration");
    return;
  }
  if (!calibration_.complete()) {
    reply_error(devices::kRegister, "ACQ_FAIL", "calibration incomplete");
    return;
  }
  if (label.empty()) {
    reply_error(devices::kRegister, "ACQ_FAIL", "fiducial label missing");
    return;
  }
  if (!latest_.stylus) {
    reply_error(devices::kRegister, "ACQ_FAIL", "stylus not visible");
    return;
  }
  if (!latest_.head) {
    reply_error(devices::kRegister, "ACQ_FAIL", "head tag not visible");
    return;
  }
  for (const auto& f : registration_.collected) {
    if (f.label == label) {
      reply_error(devices::kRegister, "DUP_FID",
                  "fiducial \"" + label + "\" already collected");
      return;
    }
  }
  // Tip in tracker frame, then into the head frame sampled at the same
  // observation instant so a moving head cannot skew the pair.
  Eigen::Vector3d tip_world = apply(*latest_.stylus, calibration_.pivot->tip_offset);
  Eigen::Vector3d tip_head = apply(invert(*latest_.head), tip_world);
  registration_.collected.push_back({label, tip_head});
  reply_ok(devices::kRegister,
           "collected \"" + label + "\" (" + std::to_string(registration_.collected.size()) +
               " total)");
}

void WorkflowEngine::solve_registration() {
  if (phase_ != Phase::registration) {
    reply_error(devices::kRegister, "PHASE", "SOLVE_REG requires Registration");
    return;
  }
  if (!registration_.image_fiducials) {
    reply_error(devices::kRegister, "REG_FAIL", "no image fiducials received");
    return;
  }
  math::FiducialSet collected;
  collected.frame_id = "head";
  collected.points = registration_.collected;
  try {
    registration_.result =
        math::register_paired_points(*registration_.image_fiducials, collected);
    reply_ok(devices::kRegister,
             "registration ok; fre_rms=" + format_mm(registration_.result->fre_rms) +
                 " mm over " + std::to_string(collected.points.size()) + " fiducials");
  } catch (const math::EstimationError& e) {
    reply_error(devices::kRegister, "REG_FAIL", e.what());
  }
}

void WorkflowEngine::ingest_robot_state(const math::RigidTransform& base_flange,
                                        sim::RobotStatus status, double t) {
  robot_flange_ = base_flange;
  robot_status_ = status;
  last_time_ = std::max(last_time_, t);
  if (phase_ != Phase::idle) {
    update_floating_frame(config_.flange_frame, base_flange);
  }
}

void WorkflowEngine::navigation_step(double now) {
  if (phase_ != Phase::navigation) {
    return;
  }
  last_time_ = std::max(last_time_, now);
  if (!target_) {
    if (!nav_fail_latched_) {
      nav_fail_latched_ = true;
      reply_error(devices::kController, "NAV_FAIL", "no active target");
    }
    return;
  }
  if (!registration_.result || !calibration_.world_base || !latest_.head) {
    if (!nav_fail_latched_) {
      nav_fail_latched_ = true;
      reply_error(devices::kController, "NAV_FAIL", "missing prerequisite transform");
    }
    return;
  }

  // Desired coil pose follows the live head: W_T_C* = W_T_H(now) *
  // H_T_I * I_T_target, then back through the fixed mount and the
  // anchored base.
  math::RigidTransform world_head = tree_.world_transform(config_.head_frame);
  math::RigidTransform desired_coil =
      world_head * registration_.result->transform * *target_;
  math::RigidTransform desired_flange_world = desired_coil * invert(flange_coil_);
  math::RigidTransform desired_flange_base =
      invert(*calibration_.world_base) * desired_flange_world;

  if (robot_sink_) {
    robot_sink_(desired_flange_base);
  }

  math::RigidTransform current_coil = tree_.world_transform(config_.coil_frame);
  telemetry_.valid = true;
  telemetry_.time = now;
  telemetry_.desired_coil_world = desired_coil;
  telemetry_.desired_flange_world = desired_flange_world;
  telemetry_.desired_flange_base = desired_flange_base;
  telemetry_.position_error_mm = translation_distance(desired_coil, current_coil);
  telemetry_.angle_error_rad = rotation_angle(desired_coil, current_coil);

  igtl::StatusBody telemetry;
  telemetry.code = igtl::kStatusOk;
  telemetry.message = "tracking err_mm=" + format_mm(telemetry_.position_error_mm) +
                      " err_rad=" + format_mm(telemetry_.angle_error_rad) +
                      " robot=" + sim::to_string(robot_status_);
  emit(igtl::make_status(devices::kController, std::move(telemetry),
                         igtl::Timestamp::from_seconds(now)));
}

}  // namespace rtms::workflow
