#pragma once

#include <vector>

#include "rtms/igtl/message.hpp"
#include "rtms/scene/transform_tree.hpp"

namespace rtms::scene {

// Periodic scene synchronization: at most once per period (default
// 30 Hz) emits one TRANSFORM per frame touched since the last pass,
// carrying the frame's world transform on device "RTMS_TF_<frame>",
// then clears the pending marks. Latest state only; intermediate
// updates within a period are coalesced.
class SyncEmitter {
 public:
  SyncEmitter(TransformTree& tree, double rate_hz = 30.0);

  // `now` is seconds on the caller's clock (injected so tests never
  // depend on wall time).
  std::vector<igtl::IgtlMessage> tick(double now);

  double period() const { return period_; }

 private:
  TransformTree& tree_;
  double period_;
  bool scheduled_ = false;
  double next_due_ = 0.0;
};

struct SceneConfig {
  std::filesystem::path urdf_path;
  double sync_rate_hz = 30.0;
  std::vector<std::pair<std::string, math::RigidTransform>> frame_overrides;
};

// Plain key=value scene configuration: `urdf = <path>` (relative to the
// config file), `sync_rate_hz = <hz>`, and repeatable
// `override.<frame> = x y z qw qx qy qz` local-transform overrides.
SceneConfig load_scene_config(const std::filesystem::path& path);

}  // namespace rtms::scene
