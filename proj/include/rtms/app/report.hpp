#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace rtms::app {

struct PhaseOutcome {
  bool attempted = false;
  bool ok = false;
  std::string detail;
};

// Machine-readable summary of one scripted workflow run. Deterministic
// for equal (scenario, URDF, script, seed): equal runs serialize to
// identical bytes.
struct RunReport {
  std::string scenario;
  std::string script;
  uint64_t seed = 0;

  PhaseOutcome calibration;
  PhaseOutcome registration;
  PhaseOutcome navigation;

  std::optional<double> pivot_residual_rms_mm;
  std::optional<double> fre_rms_mm;
  std::optional<double> tre_mm;                // against simulation ground truth
  std::optional<double> convergence_time_s;    // simulated seconds
  std::optional<double> final_coil_error_mm;   // vs ground-truth chain
  std::optional<double> final_coil_error_rad;

  std::map<std::string, uint64_t> message_counts;  // outbound, by device

  bool ok() const {
    return calibration.attempted && calibration.ok && registration.attempted &&
           registration.ok && navigation.attempted && navigation.ok;
  }

  // Line-oriented key/value section followed by a JSON document.
  std::string serialize() const;
};

std::string format_double(double v);

}  // namespace rtms::app
