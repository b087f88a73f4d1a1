#include "rtms/scene/sync.hpp"

#include "rtms/devices.hpp"
#include "rtms/keyvalue.hpp"

namespace rtms::scene {

SyncEmitter::SyncEmitter(TransformTree& tree, double rate_hz) : tree_(tree) {
  if (rate_hz <= 0) {
    throw SceneError(SceneErrc::config, "sync rate must be positive");
  }
  period_ = 1.0 / rate_hz;
  for (const auto& id : tree_.frame_ids()) {
    if (devices::transform_device(id).size() > igtl::kDeviceNameMax) {
      throw SceneError(SceneErrc::config,
                       "frame id \"" + id + "\" too long for a device name");
    }
  }
}

std::vector<igtl::IgtlMessage> SyncEmitter::tick(double now) {
  if (!scheduled_) {
    scheduled_ = true;
    next_due_ = now;
  }
  if (now < next_due_) {
    return {};
  }
  while (next_due_ <= now) {
    next_due_ += period_;
  }

  std::vector<igtl::IgtlMessage> out;
  auto ts = igtl::Timestamp::from_seconds(now);
  for (const auto& id : tree_.dirty_frames()) {
    out.push_back(igtl::make_transform(devices::transform_device(id),
                                       tree_.world_transform(id).to_columns34(), ts));
  }
  tree_.clear_dirty();
  return out;
}

SceneConfig load_scene_config(const std::filesystem::path& path) {
  KeyValueFile kv = KeyValueFile::load(path);
  SceneConfig config;
  auto urdf = kv.get("urdf");
  if (!urdf) {
    throw SceneError(SceneErrc::config, path.string() + ": missing key \"urdf\"");
  }
  config.urdf_path = std::filesystem::path(*urdf);
  if (config.urdf_path.is_relative()) {
    config.urdf_path = path.parent_path() / config.urdf_path;
  }
  config.sync_rate_hz = kv.get_double("sync_rate_hz", 30.0);
  if (config.sync_rate_hz <= 0) {
    throw SceneError(SceneErrc::config, path.string() + ": sync_rate_hz must be positive");
  }
  for (const auto& entry : kv.entries()) {
    if (entry.key.rfind("override.", 0) != 0) {
      continue;
    }
    std::string frame = entry.key.substr(9);
    auto v = KeyValueFile::parse_doubles(entry.value, 7,
                                         path.string() + ": " + entry.key);
    math::RigidTransform local(Eigen::Quaterniond(v[3], v[4], v[5], v[6]),
                               Eigen::Vector3d(v[0], v[1], v[2]));
    config.frame_overrides.emplace_back(frame, local);
  }
  return config;
}

}  // namespace rtms::scene
