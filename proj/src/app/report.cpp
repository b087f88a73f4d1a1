#include "rtms/app/report.hpp"

#include <charconv>
#include <sstream>

#include <json.hpp>

namespace rtms::app {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc() ? std::string(buf, ptr) : "nan";
}

namespace {

void phase_lines(std::ostringstream& out, const char* name, const PhaseOutcome& p) {
  out << "phase." << name << " = "
      << (!p.attempted ? "SKIPPED" : (p.ok ? "OK" : "FAIL")) << "\n";
  if (!p.detail.empty()) {
    out << "phase." << name << ".detail = " << p.detail << "\n";
  }
}

nlohmann::ordered_json phase_json(const PhaseOutcome& p) {
  nlohmann::ordered_json j;
  j["attempted"] = p.attempted;
  j["ok"] = p.ok;
  j["detail"] = p.detail;
  return j;
}

}  // namespace

std::string RunReport::serialize() const {
  std::ostringstream out;
  out << "scenario = " << scenario << "\n";
  out << "script = " << script << "\n";
  out << "seed = " << seed << "\n";
  out << "result = " << (ok() ? "OK" : "FAIL") << "\n";
  phase_lines(out, "calibration", calibration);
  phase_lines(out, "registration", registration);
  phase_lines(out, "navigation", navigation);
  if (pivot_residual_rms_mm) {
    out << "pivot_residual_rms_mm = " << format_double(*pivot_residual_rms_mm) << "\n";
  }
  if (fre_rms_mm) {
    out << "fre_rms_mm = " << format_double(*fre_rms_mm) << "\n";
  }
  if (tre_mm) {
    out << "tre_mm = " << format_double(*tre_mm) << "\n";
  }
  if (convergence_time_s) {
    out << "convergence_time_s = " << format_double(*convergence_time_s) << "\n";
  }
  if (final_coil_error_mm) {
    out << "final_coil_error_mm = " << format_double(*final_coil_error_mm) << "\n";
  }
  if (final_coil_error_rad) {
    out << "final_coil_error_rad = " << format_double(*final_coil_error_rad) << "\n";
  }
  for (const auto& [device, count] : message_counts) {
    out << "messages." << device << " = " << count << "\n";
  }

  nlohmann::ordered_json j;
  j["scenario"] = scenario;
  j["script"] = script;
  j["seed"] = seed;
  j["result"] = ok() ? "OK" : "FAIL";
  j["phases"]["calibration"] = phase_json(calibration);
  j["phases"]["registration"] = phase_json(registration);
  j["phases"]["navigation"] = phase_json(navigation);
  auto set_opt = [&](const char* key, const std::optional<double>& v) {
    if (v) {
      j["metrics"][key] = *v;
    }
  };
  set_opt("pivot_residual_rms_mm", pivot_residual_rms_mm);
  set_opt("fre_rms_mm", fre_rms_mm);
  set_opt("tre_mm", tre_mm);
  set_opt("convergence_time_s", convergence_time_s);
  set_opt("final_coil_error_mm", final_coil_error_mm);
  set_opt("final_coil_error_rad", final_coil_error_rad);
  j["message_counts"] = nlohmann::ordered_json::object();
  for (const auto& [device, count] : message_counts) {
    j["message_counts"][device] = count;
  }

  out << "\n" << j.dump(2) << "\n";
  return out.str();
}

}  // namespace rtms::app
