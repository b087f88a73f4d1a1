#pragma once

#include <string>

// OpenIGTLink device-name contract. Every stream carries a unique
// device name; the application layer routes on these. Names must fit
// the 20-byte header field.
namespace rtms::devices {

// Inbound (application layer -> this stack)
inline constexpr const char* kCommand = "RTMS_STATUS_CMD";
inline constexpr const char* kTarget = "RTMS_TF_TARGET";
inline constexpr const char* kImageFiducials = "RTMS_FID_IMAGE";

// Outbound node states
inline constexpr const char* kDetector = "RTMS_STATUS_DETECTOR";
inline constexpr const char* kCalibrator = "RTMS_STATUS_CALIB";
inline constexpr const char* kRegister = "RTMS_STATUS_REGISTER";
inline constexpr const char* kTracker = "RTMS_STATUS_TRACKER";
inline constexpr const char* kController = "RTMS_STATUS_CONTROL";

// Transport-level notices (session refusal, readiness)
inline constexpr const char* kServer = "RTMS_STATUS_SERVER";

inline constexpr const char* kTransformPrefix = "RTMS_TF_";
inline constexpr const char* kFiducialPrefix = "RTMS_FID_";

inline std::string transform_device(const std::string& frame_id) {
  return std::string(kTransformPrefix) + frame_id;
}

}  // namespace rtms::devices
