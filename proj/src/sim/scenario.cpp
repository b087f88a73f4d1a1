#include "rtms/sim/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "rtms/keyvalue.hpp"

namespace rtms::sim {

namespace {

math::RigidTransform pose_from(const std::vector<double>& v) {
  return math::RigidTransform(Eigen::Quaterniond(v[3], v[4], v[5], v[6]),
                              Eigen::Vector3d(v[0], v[1], v[2]));
}

math::RigidTransform pose_key(const KeyValueFile& kv, const std::string& key,
                              const math::RigidTransform& fallback) {
  if (!kv.has(key)) {
    return fallback;
  }
  return pose_from(kv.get_doubles(key, 7));
}

Eigen::Vector3d vec_key(const KeyValueFile& kv, const std::string& key,
                        const Eigen::Vector3d& fallback) {
  if (!kv.has(key)) {
    return fallback;
  }
  auto v = kv.get_doubles(key, 3);
  return {v[0], v[1], v[2]};
}

}  // namespace

math::RigidTransform MotionProfile::pose_at(double t) const {
  if (keyframes.empty()) {
    return {};
  }
  if (t <= keyframes.front().time) {
    return keyframes.front().pose;
  }
  for (std::size_t i = 0; i + 1 < keyframes.size(); ++i) {
    const Keyframe& a = keyframes[i];
    const Keyframe& b = keyframes[i + 1];
    if (t >= b.time) {
      continue;
    }
    if (b.step) {
      return a.pose;  // hold until the step time
    }
    double span = b.time - a.time;
    double s = span > 0 ? (t - a.time) / span : 1.0;
    return interpolate_pose(a.pose, b.pose, s);
  }
  return keyframes.back().pose;
}

ScenarioConfig parse_scenario(const std::string& text, const std::string& origin) {
  KeyValueFile kv = KeyValueFile::parse(text, origin);
  ScenarioConfig config;
  try {
    config.seed = kv.get_u64("seed", 0);
    config.tracker_rate_hz = kv.get_double("tracker.rate_hz", 30.0);
    config.sync_rate_hz = kv.get_double("sync_rate_hz", 30.0);
    config.noise.sigma_translation_mm = kv.get_double("tracker.sigma_translation_mm", 0.0);
    config.noise.sigma_rotation_rad = kv.get_double("tracker.sigma_rotation_rad", 0.0);
    config.noise.seed = config.seed;

    config.base_pose = pose_key(kv, "world.base_pose", {});
    config.image_pose = pose_key(kv, "world.image_pose", {});

    math::RigidTransform head0 = pose_key(kv, "world.head_pose", {});
    config.head_motion.keyframes.push_back({0.0, head0, false});
    for (const auto& entry : kv.entries()) {
      if (entry.key != "head_keyframe" && entry.key != "head_step") {
        continue;
      }
      auto v = KeyValueFile::parse_doubles(entry.value, 8,
                                           origin + ": " + entry.key);
      MotionProfile::Keyframe k;
      k.time = v[0];
      k.pose = pose_from({v[1], v[2], v[3], v[4], v[5], v[6], v[7]});
      k.step = (entry.key == "head_step");
      config.head_motion.keyframes.push_back(k);
    }
    std::stable_sort(config.head_motion.keyframes.begin(),
                     config.head_motion.keyframes.end(),
                     [](const auto& a, const auto& b) { return a.time < b.time; });

    for (const auto& value : kv.get_all("fiducial")) {
      std::istringstream in(value);
      std::string label;
      double x, y, z;
      if (!(in >> label >> x >> y >> z)) {
        throw ScenarioError(origin + ": fiducial entry needs `label x y z`, got \"" +
                            value + "\"");
      }
      config.fiducials.push_back({label, Eigen::Vector3d(x, y, z)});
    }

    config.stylus_tip_offset =
        vec_key(kv, "stylus.tip_offset", config.stylus_tip_offset);
    config.stylus_pivot_point =
        vec_key(kv, "stylus.pivot_point", config.stylus_pivot_point);
    config.stylus_park = pose_key(kv, "stylus.park_pose",
                                  math::RigidTransform::from_translation(
                                      config.stylus_pivot_point -
                                      config.stylus_tip_offset));
    config.flange_tag = pose_key(kv, "flange_tag", {});

    config.robot_initial_flange = pose_key(kv, "robot.initial_flange", {});
    config.robot.max_linear_mm_s =
        kv.get_double("robot.max_linear_mm_s", config.robot.max_linear_mm_s);
    config.robot.max_angular_rad_s =
        kv.get_double("robot.max_angular_rad_s", config.robot.max_angular_rad_s);
    config.robot.workspace_min =
        vec_key(kv, "robot.workspace_min", config.robot.workspace_min);
    config.robot.workspace_max =
        vec_key(kv, "robot.workspace_max", config.robot.workspace_max);
    config.robot.position_tolerance_mm =
        kv.get_double("robot.position_tolerance_mm", config.robot.position_tolerance_mm);
    config.robot.angle_tolerance_rad =
        kv.get_double("robot.angle_tolerance_rad", config.robot.angle_tolerance_rad);

    for (const auto& value : kv.get_all("occlude")) {
      std::istringstream in(value);
      OcclusionWindow w;
      if (!(in >> w.tag_id >> w.begin >> w.end)) {
        throw ScenarioError(origin + ": occlude entry needs `tag t_begin t_end`, got \"" +
                            value + "\"");
      }
      config.occlusions.push_back(w);
    }
  } catch (const ConfigError& e) {
    throw ScenarioError(e.what());
  }

  if (config.tracker_rate_hz <= 0 || config.sync_rate_hz <= 0) {
    throw ScenarioError(origin + ": rates must be positive");
  }
  if (config.noise.sigma_translation_mm < 0 || config.noise.sigma_rotation_rad < 0) {
    throw ScenarioError(origin + ": noise sigmas must be non-negative");
  }
  return config;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  try {
    KeyValueFile kv = KeyValueFile::load(path);  // existence / IO check
    (void)kv;
  } catch (const ConfigError& e) {
    throw ScenarioError(e.what());
  }
  std::ifstream in(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path.string());
}

}  // namespace rtms::sim
