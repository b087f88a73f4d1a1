#include "rtms/app/runner.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "rtms/devices.hpp"
#include "rtms/scene/urdf.hpp"

namespace rtms::app {

namespace {

using Clock = std::chrono::steady_clock;

igtl::Timestamp sim_ts(double t) {
  return igtl::Timestamp::from_seconds(t);
}

}  // namespace

WorkflowHost::WorkflowHost(sim::ScenarioConfig scenario,
                           std::vector<scene::FrameNode> frames, uint16_t port,
                           int accept_limit)
    : scenario_(std::move(scenario)),
      sim_(scenario_),
      tree_(std::move(frames)),
      server_(net::EndpointConfig{"127.0.0.1", port, net::EndpointConfig::Role::server,
                                  accept_limit}) {
  server_.start();
  inbound_ = server_.hub().subscribe(net::Selector::all());
  engine_ = std::make_unique<workflow::WorkflowEngine>(
      tree_, workflow::EngineConfig{},
      [this](const igtl::IgtlMessage& m) { emit(m); },
      [this](const math::RigidTransform& pose) { sim_.robot().command(pose); });
  sync_ = std::make_unique<scene::SyncEmitter>(tree_, scenario_.sync_rate_hz);
}

WorkflowHost::~WorkflowHost() {
  server_.stop();
}

void WorkflowHost::emit(const igtl::IgtlMessage& message) {
  ++message_counts_[message.header.device_name];
  server_.hub().broadcast(message);
}

void WorkflowHost::tick() {
  sim_.step(tick_dt());
  double t = sim_.time();
  engine_->ingest_robot_state(sim_.robot().flange_pose(), sim_.robot().status(), t);
  auto observations = sim_.observe();
  engine_->ingest_observation(observations, t);
  engine_->navigation_step(t);
  for (const auto& m : sync_->tick(t)) {
    emit(m);
  }
}

std::size_t WorkflowHost::pump_inbound() {
  std::size_t handled = 0;
  while (auto d = inbound_->try_poll()) {
    if (d->kind == net::EventKind::message) {
      engine_->handle_message(d->message);
      ++handled;
    }
  }
  return handled;
}

bool WorkflowHost::pump_inbound_until(const std::string& device, std::size_t count,
                                      std::chrono::milliseconds timeout) {
  std::size_t seen = 0;
  auto deadline = Clock::now() + timeout;
  while (Clock::now() < deadline) {
    auto d = inbound_->poll(std::chrono::milliseconds(20));
    if (!d) {
      continue;
    }
    if (d->kind != net::EventKind::message) {
      continue;
    }
    engine_->handle_message(d->message);
    if (d->message.header.device_name == device && ++seen >= count) {
      return true;
    }
  }
  return false;
}

void WorkflowHost::greet_new_sessions() {
  for (uint64_t id : server_.hub().open_sessions()) {
    if (!greeted_.insert(id).second) {
      continue;
    }
    igtl::StatusBody hello;
    hello.code = igtl::kStatusOk;
    hello.message = std::string("ready; phase=") + workflow::to_string(engine_->phase());
    try {
      server_.hub().send(id, igtl::make_status(devices::kServer, std::move(hello),
                                               sim_ts(sim_.time())));
    } catch (const net::TransportError&) {
      // session raced away
    }
  }
}

namespace {

struct ScriptStep {
  std::string verb;
  std::vector<std::string> args;
  int line = 0;
};

std::vector<ScriptStep> parse_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open script file " + path.string());
  }
  std::vector<ScriptStep> steps;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream tokens(line);
    ScriptStep step;
    step.line = line_no;
    if (!(tokens >> step.verb)) {
      continue;
    }
    std::string arg;
    while (tokens >> arg) {
      step.args.push_back(arg);
    }
    steps.push_back(std::move(step));
  }
  return steps;
}

double arg_double(const ScriptStep& step, std::size_t index) {
  if (index >= step.args.size()) {
    throw std::runtime_error("script line " + std::to_string(step.line) +
                             ": missing argument for " + step.verb);
  }
  return std::stod(step.args[index]);
}

// Drives the scripted run: owns the loopback client and the report.
class ScriptRunner {
 public:
  ScriptRunner(WorkflowHost& host, std::ostream& log, RunReport& report)
      : host_(host),
        log_(log),
        report_(report),
        client_("127.0.0.1", host.server().port()),
        client_feed_(client_.subscribe(net::Selector::all())) {}

  bool execute(const std::vector<ScriptStep>& steps);
  void finalize();

 private:
  static constexpr std::chrono::milliseconds kPumpTimeout{5000};

  bool send_command(const std::string& text);
  void drain_client();
  void run_ticks(std::size_t n);
  bool step(const ScriptStep& s);
  bool wait_converged(double timeout_s);
  std::string fail(const ScriptStep& s, const std::string& why);

  WorkflowHost& host_;
  std::ostream& log_;
  RunReport& report_;
  net::Client client_;
  std::shared_ptr<net::MessageFeed> client_feed_;
  std::optional<math::RigidTransform> scripted_target_;
  double target_set_time_ = 0.0;
  std::string last_error_;
};

bool ScriptRunner::send_command(const std::string& text) {
  igtl::StatusBody body;
  body.code = igtl::kStatusOk;
  body.message = text;
  client_.send(igtl::make_status(devices::kCommand, std::move(body),
                                 sim_ts(host_.time())));
  bool ok = host_.pump_inbound_until(devices::kCommand, 1, kPumpTimeout);
  drain_client();
  return ok;
}

void ScriptRunner::drain_client() {
  while (client_feed_->try_poll()) {
  }
}

void ScriptRunner::run_ticks(std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    host_.tick();
    host_.pump_inbound();
    drain_client();
  }
}

std::string ScriptRunner::fail(const ScriptStep& s, const std::string& why) {
  std::string text = "script line " + std::to_string(s.line) + " (" + s.verb + "): " + why;
  log_ << "rtms: " << text << "\n";
  last_error_ = text;
  return text;
}

bool ScriptRunner::wait_converged(double timeout_s) {
  double t_begin = host_.time();
  bool robot_converged = false;
  while (host_.time() - t_begin < timeout_s) {
    run_ticks(1);
    auto& robot = host_.sim().robot();
    if (robot.status() == sim::RobotStatus::fault) {
      return false;
    }
    if (!robot_converged && robot.status() == sim::RobotStatus::converged) {
      robot_converged = true;
      report_.convergence_time_s = host_.time() - target_set_time_;
    }
    const auto& telemetry = host_.engine().telemetry();
    if (robot_converged && telemetry.valid && telemetry.position_error_mm <= 1e-9 &&
        telemetry.angle_error_rad <= 1e-9) {
      break;  // settled to numerical rest
    }
  }
  return robot_converged;
}

bool ScriptRunner::step(const ScriptStep& s) {
  auto& world = host_.sim().world();
  if (s.verb == "start_calib") {
    report_.calibration.attempted = true;
    if (!send_command("START_CALIB")) return false;
    return host_.engine().phase() == workflow::Phase::calibration;
  }
  if (s.verb == "calib_pivot") {
    std::size_t n = static_cast<std::size_t>(arg_double(s, 0));
    world.stylus_pivot_sweep();
    if (!send_command("CALIB_PIVOT " + std::to_string(n))) return false;
    std::size_t budget = n + 10;
    while (budget-- > 0 && !host_.engine().calibration().pivot) {
      run_ticks(1);
    }
    if (!host_.engine().calibration().pivot) {
      fail(s, "pivot calibration did not complete");
      return false;
    }
    report_.pivot_residual_rms_mm = host_.engine().calibration().pivot->residual_rms;
    return true;
  }
  if (s.verb == "calib_base") {
    std::size_t n = static_cast<std::size_t>(arg_double(s, 0));
    if (!send_command("CALIB_BASE " + std::to_string(n))) return false;
    std::size_t budget = n + 10;
    while (budget-- > 0 && !host_.engine().calibration().world_base) {
      run_ticks(1);
    }
    if (!host_.engine().calibration().world_base) {
      fail(s, "base anchoring did not complete");
      return false;
    }
    return true;
  }
  if (s.verb == "start_reg") {
    report_.registration.attempted = true;
    if (!send_command("START_REG")) return false;
    return host_.engine().phase() == workflow::Phase::registration;
  }
  if (s.verb == "send_fiducials") {
    igtl::PolyDataBody body;
    const auto& fiducials = host_.scenario().fiducials;
    for (std::size_t i = 0; i < fiducials.size(); ++i) {
      if (fiducials[i].label != "F" + std::to_string(i + 1)) {
        fail(s, "scenario fiducials must be labeled F1..Fn in order to match the "
                "POLYDATA point-order convention");
        return false;
      }
      Eigen::Vector3d p_image =
          apply(invert(host_.scenario().image_pose), fiducials[i].position);
      body.points.push_back({static_cast<float>(p_image.x()),
                             static_cast<float>(p_image.y()),
                             static_cast<float>(p_image.z())});
    }
    client_.send(igtl::make_polydata(devices::kImageFiducials, std::move(body),
                                     sim_ts(host_.time())));
    if (!host_.pump_inbound_until(devices::kImageFiducials, 1, kPumpTimeout)) {
      fail(s, "image fiducials were not delivered");
      return false;
    }
    drain_client();
    return true;
  }
  if (s.verb == "collect") {
    if (s.args.empty()) {
      fail(s, "collect needs a fiducial label");
      return false;
    }
    world.stylus_touch(s.args[0]);
    run_ticks(1);  // let the tracker see the stylus on the fiducial
    std::size_t before = host_.engine().registration().collected.size();
    if (!send_command("COLLECT " + s.args[0])) return false;
    if (host_.engine().registration().collected.size() != before + 1) {
      fail(s, "fiducial \"" + s.args[0] + "\" was not collected");
      return false;
    }
    return true;
  }
  if (s.verb == "solve_reg") {
    if (!send_command("SOLVE_REG")) return false;
    if (!host_.engine().registration().result) {
      fail(s, "registration solve failed");
      return false;
    }
    report_.fre_rms_mm = host_.engine().registration().result->fre_rms;
    return true;
  }
  if (s.verb == "start_nav") {
    report_.navigation.attempted = true;
    if (!send_command("START_NAV")) return false;
    return host_.engine().phase() == workflow::Phase::navigation;
  }
  if (s.verb == "target") {
    if (s.args.size() != 7) {
      fail(s, "target needs `x y z qw qx qy qz`");
      return false;
    }
    std::vector<double> v;
    for (std::size_t i = 0; i < 7; ++i) {
      v.push_back(arg_double(s, i));
    }
    math::RigidTransform target(Eigen::Quaterniond(v[3], v[4], v[5], v[6]),
                                Eigen::Vector3d(v[0], v[1], v[2]));
    client_.send(igtl::make_transform(devices::kTarget, target.to_columns34(),
                                      sim_ts(host_.time())));
    if (!host_.pump_inbound_until(devices::kTarget, 1, kPumpTimeout)) {
      fail(s, "target was not delivered");
      return false;
    }
    drain_client();
    if (!host_.engine().target()) {
      fail(s, "target rejected");
      return false;
    }
    scripted_target_ = target;
    target_set_time_ = host_.time();
    return true;
  }
  if (s.verb == "wait_converged") {
    if (!wait_converged(arg_double(s, 0))) {
      fail(s, "robot did not converge in time");
      return false;
    }
    return true;
  }
  if (s.verb == "run") {
    run_ticks(static_cast<std::size_t>(
        std::llround(arg_double(s, 0) * host_.scenario().tracker_rate_hz)));
    return true;
  }
  if (s.verb == "abort") {
    return send_command("ABORT");
  }
  if (s.verb == "stylus_park") {
    world.stylus_park();
    return true;
  }
  fail(s, "unknown script verb");
  return false;
}

bool ScriptRunner::execute(const std::vector<ScriptStep>& steps) {
  for (const auto& s : steps) {
    if (!step(s)) {
      if (last_error_.empty()) {
        fail(s, "step failed");
      }
      return false;
    }
  }
  return true;
}

void ScriptRunner::finalize() {
  auto& engine = host_.engine();
  const auto& scenario = host_.scenario();

  report_.calibration.ok = engine.calibration().complete();
  if (report_.calibration.attempted && !report_.calibration.ok &&
      report_.calibration.detail.empty()) {
    report_.calibration.detail = "calibration incomplete";
  }
  report_.registration.ok = engine.registration().result.has_value();

  if (engine.registration().result && scripted_target_) {
    report_.tre_mm = math::target_registration_error(
        *engine.registration().result, scenario.image_pose,
        scripted_target_->translation());
  }

  if (report_.navigation.attempted) {
    bool fault = host_.sim().robot().status() == sim::RobotStatus::fault;
    report_.navigation.ok =
        !fault && report_.convergence_time_s.has_value();
    if (scripted_target_) {
      // Ground-truth chain at the final instant versus the coil pose the
      // simulated robot actually reached.
      double t = host_.time();
      math::RigidTransform desired_truth = host_.sim().world().head_pose(t) *
                                           scenario.image_pose * *scripted_target_;
      math::RigidTransform coil_truth = scenario.base_pose *
                                        host_.sim().robot().flange_pose() *
                                        engine.flange_coil();
      report_.final_coil_error_mm = translation_distance(desired_truth, coil_truth);
      report_.final_coil_error_rad = rotation_angle(desired_truth, coil_truth);
    }
    if (fault) {
      report_.navigation.detail = host_.sim().robot().fault_reason();
    }
  }

  for (const auto& [device, count] : host_.message_counts()) {
    report_.message_counts[device] = count;
  }

  if (!last_error_.empty()) {
    // Attach the first failure to the phase that was active.
    PhaseOutcome* slot = nullptr;
    if (report_.navigation.attempted) slot = &report_.navigation;
    else if (report_.registration.attempted) slot = &report_.registration;
    else if (report_.calibration.attempted) slot = &report_.calibration;
    if (slot && slot->detail.empty()) {
      slot->detail = last_error_;
    }
  }
}

}  // namespace

int run_workflow(const RunOptions& options, std::ostream& log, RunReport* out) {
  sim::ScenarioConfig scenario = sim::load_scenario(options.scenario_path);
  if (options.seed) {
    scenario.seed = *options.seed;
    scenario.noise.seed = *options.seed;
  }
  std::vector<scene::FrameNode> frames = scene::parse_urdf_file(options.urdf_path);
  std::vector<ScriptStep> steps = parse_script(options.script_path);

  RunReport report;
  report.scenario = options.scenario_path.filename().string();
  report.script = options.script_path.filename().string();
  report.seed = scenario.seed;

  {
    WorkflowHost host(scenario, std::move(frames), options.port);
    ScriptRunner runner(host, log, report);
    runner.execute(steps);
    runner.finalize();
  }

  if (!options.report_path.empty()) {
    std::ofstream file(options.report_path, std::ios::binary);
    if (!file) {
      log << "rtms: cannot write report to " << options.report_path << "\n";
      return 2;
    }
    file << report.serialize();
  }
  if (out) {
    *out = report;
  }
  return report.ok() ? 0 : 1;
}

int serve_workflow(const ServeOptions& options, std::ostream& log,
                   const std::atomic<bool>& stop) {
  sim::ScenarioConfig scenario = sim::load_scenario(options.scenario_path);
  std::vector<scene::FrameNode> frames = scene::parse_urdf_file(options.urdf_path);

  WorkflowHost host(scenario, std::move(frames), options.port, options.accept_limit);
  log << "rtms: serving OpenIGTLink on port " << host.server().port() << "\n";

  auto period = std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double>(host.tick_dt()));
  auto next = Clock::now() + period;
  while (!stop.load()) {
    host.pump_inbound();
    host.tick();
    host.greet_new_sessions();
    std::this_thread::sleep_until(next);
    next += period;
  }

  // Freeze the robot at its current pose before shutting down.
  host.sim().robot().command(host.sim().robot().flange_pose());
  log << "rtms: interrupted; robot frozen, shutting down\n";
  return 0;
}

}  // namespace rtms::app
