#include <CLI11.hpp>
#include <atomic>
#include <csignal>
#include <iostream>

#include "rtms/app/codec_tool.hpp"
#include "rtms/app/runner.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

void handle_signal(int) {
  g_interrupted = true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rtms: OpenIGTLink coordination stack for robot-assisted TMS"};
  app.require_subcommand(1);

  // serve
  auto* serve = app.add_subcommand(
      "serve", "Run the simulator, workflow engine, and OpenIGTLink server");
  std::string serve_scenario, serve_urdf;
  uint16_t serve_port = 18944;
  int accept_limit = 4;
  serve->add_option("--scenario", serve_scenario, "Scenario file")->required();
  serve->add_option("--urdf", serve_urdf, "URDF scene description")->required();
  serve->add_option("--port", serve_port, "TCP port (default 18944)")
      ->envname("RTMS_PORT");
  serve->add_option("--accept-limit", accept_limit, "Maximum concurrent sessions");

  // run
  auto* run = app.add_subcommand(
      "run", "Execute a scripted workflow end to end over a loopback connection");
  std::string run_scenario, run_urdf, run_script, run_report;
  uint64_t run_seed = 0;
  bool seed_given = false;
  uint16_t run_port = 0;
  run->add_option("--scenario", run_scenario, "Scenario file")->required();
  run->add_option("--urdf", run_urdf, "URDF scene description")->required();
  run->add_option("--script", run_script, "Workflow script")->required();
  run->add_option("--report", run_report, "Report output path")->required();
  run->add_option("--seed", run_seed, "Override the scenario seed")
      ->each([&](const std::string&) { seed_given = true; });
  run->add_option("--port", run_port, "Loopback port (default: ephemeral)")
      ->envname("RTMS_PORT");

  // codec
  auto* codec = app.add_subcommand("codec", "Inspect or roundtrip OpenIGTLink frames");
  std::string codec_mode, codec_path;
  codec->add_option("mode", codec_mode, "inspect | roundtrip")
      ->required()
      ->check(CLI::IsMember({"inspect", "roundtrip"}));
  codec->add_option("path", codec_path, "File of concatenated frames")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (serve->parsed()) {
      std::signal(SIGINT, handle_signal);
      std::signal(SIGTERM, handle_signal);
      rtms::app::ServeOptions options;
      options.scenario_path = serve_scenario;
      options.urdf_path = serve_urdf;
      options.port = serve_port;
      options.accept_limit = accept_limit;
      return rtms::app::serve_workflow(options, std::cout, g_interrupted);
    }
    if (run->parsed()) {
      rtms::app::RunOptions options;
      options.scenario_path = run_scenario;
      options.urdf_path = run_urdf;
      options.script_path = run_script;
      options.report_path = run_report;
      options.port = run_port;
      if (seed_given) {
        options.seed = run_seed;
      }
      return rtms::app::run_workflow(options, std::cout);
    }
    if (codec->parsed()) {
      return codec_mode == "inspect" ? rtms::app::codec_inspect(codec_path, std::cout)
                                     : rtms::app::codec_roundtrip(codec_path, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "rtms: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
