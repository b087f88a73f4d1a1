#pragma once

#include <atomic>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>

#include "rtms/app/report.hpp"
#include "rtms/net/server.hpp"
#include "rtms/scene/sync.hpp"
#include "rtms/sim/robot.hpp"
#include "rtms/workflow/engine.hpp"

namespace rtms::app {

// Simulator + scene + workflow engine + OpenIGTLink server wired
// together. One tick advances the simulated clock by a tracker period:
// robot state and tracker observations feed the engine, the navigation
// step runs, and the scene synchronization pass broadcasts dirty
// transforms. All outbound messages are counted per device.
class WorkflowHost {
 public:
  WorkflowHost(sim::ScenarioConfig scenario, std::vector<scene::FrameNode> frames,
               uint16_t port, int accept_limit = 4);
  ~WorkflowHost();

  void tick();

  // Deliver pending inbound messages to the engine without advancing
  // simulated time. Returns how many were handled.
  std::size_t pump_inbound();

  // Pump until `count` messages for `device` have been handled; wall
  // timeout only (simulated time stays put).
  bool pump_inbound_until(const std::string& device, std::size_t count,
                          std::chrono::milliseconds timeout);

  // Greet sessions that appeared since the last call.
  void greet_new_sessions();

  double time() const { return sim_.time(); }
  double tick_dt() const { return 1.0 / scenario_.tracker_rate_hz; }

  sim::Simulation& sim() { return sim_; }
  scene::TransformTree& tree() { return tree_; }
  workflow::WorkflowEngine& engine() { return *engine_; }
  net::Server& server() { return server_; }
  const sim::ScenarioConfig& scenario() const { return scenario_; }
  const std::map<std::string, uint64_t>& message_counts() const {
    return message_counts_;
  }

 private:
  void emit(const igtl::IgtlMessage& message);

  sim::ScenarioConfig scenario_;
  sim::Simulation sim_;
  scene::TransformTree tree_;
  net::Server server_;
  std::shared_ptr<net::MessageFeed> inbound_;
  std::unique_ptr<workflow::WorkflowEngine> engine_;
  std::unique_ptr<scene::SyncEmitter> sync_;
  std::map<std::string, uint64_t> message_counts_;
  std::set<uint64_t> greeted_;
};

struct RunOptions {
  std::filesystem::path scenario_path;
  std::filesystem::path urdf_path;
  std::filesystem::path script_path;
  std::filesystem::path report_path;
  std::optional<uint64_t> seed;  // overrides the scenario seed
  uint16_t port = 0;             // 0 = ephemeral loopback port
};

// Execute a scripted workflow end to end over a loopback OpenIGTLink
// connection; writes the report (also returned through `out` when
// non-null). Returns the process exit code: 0 iff every phase is OK.
int run_workflow(const RunOptions& options, std::ostream& log, RunReport* out = nullptr);

struct ServeOptions {
  std::filesystem::path scenario_path;
  std::filesystem::path urdf_path;
  uint16_t port = 18944;
  int accept_limit = 4;
};

// Serve until `stop` becomes true (wall-clock loop at the tracker rate).
int serve_workflow(const ServeOptions& options, std::ostream& log,
                   const std::atomic<bool>& stop);

}  // namespace rtms::app
