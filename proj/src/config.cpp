#include "mir/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include "mir/bus.hpp"
#include "mir/error.hpp"

namespace mir::cli {

namespace {

[[noreturn]] void fail_at(const YAML::Node& node, const std::string& what) {
  const auto mark = node.Mark();
  if (mark.line >= 0) throw ConfigError("config line " + std::to_string(mark.line + 1) + ": " + what);
  throw ConfigError("config: " + what);
}

template <class T>
T scalar(const YAML::Node& node, const std::string& key, const char* type_name) {
  if (!node.IsScalar()) fail_at(node, key + ": expected " + type_name);
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail_at(node, key + ": expected " + type_name + ", got '" + node.Scalar() + "'");
  }
}

// Walks one mapping, dispatching each key to its handler and rejecting the rest.
using Handlers = std::map<std::string, std::function<void(const YAML::Node&)>>;

void visit_map(const YAML::Node& node, const std::string& section, const Handlers& handlers) {
  if (node.IsNull()) return;
  if (!node.IsMap()) fail_at(node, (section.empty() ? "document" : section) + ": expected a mapping");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    const std::string path = section.empty() ? key : section + "." + key;
    const auto it = handlers.find(key);
    if (it == handlers.end()) fail_at(kv.first, "unknown key '" + path + "'");
    it->second(kv.second);
  }
}

template <class T>
std::function<void(const YAML::Node&)> num(T& field, std::string path) {
  return [&field, path = std::move(path)](const YAML::Node& n) {
    field = scalar<T>(n, path, "a number");
  };
}

std::function<void(const YAML::Node&)> flag(bool& field, std::string path) {
  return [&field, path = std::move(path)](const YAML::Node& n) {
    field = scalar<bool>(n, path, "true or false");
  };
}

std::function<void(const YAML::Node&)> path_field(std::optional<std::filesystem::path>& field,
                                                  const std::filesystem::path& base,
                                                  std::string key) {
  return [&field, base, key = std::move(key)](const YAML::Node& n) {
    if (n.IsNull()) {
      field.reset();
      return;
    }
    std::filesystem::path p = scalar<std::string>(n, key, "a path");
    field = p.is_relative() && !base.empty() ? base / p : p;
  };
}

}  // namespace

std::vector<std::string> default_record_topics() {
  return {std::string(bus::topics::kEncoderPulse), std::string(bus::topics::kImu),
          std::string(bus::topics::kScan), std::string(bus::topics::kCamera)};
}

void BringupConfig::validate() const {
  plant.validate();
  teleop.validate();
  if (daq) daq->validate();
  if (!(firmware.watchdog_timeout > 0.0)) throw ConfigError("firmware.watchdog_timeout must be positive");
  if (!(firmware.publish_period > 0.0)) throw ConfigError("firmware.publish_period must be positive");
  if (!(firmware.heartbeat_period > 0.0)) throw ConfigError("firmware.heartbeat_period must be positive");
  if (link.latency < 0.0) throw ConfigError("link.latency must be non-negative");
  if (link.drop_probability < 0.0 || link.drop_probability > 1.0) {
    throw ConfigError("link.drop_probability must lie in [0, 1]");
  }
  if (duration < 0.0) throw ConfigError("duration must be non-negative");
  if (queue_depth < 1) throw ConfigError("queue_depth must be at least 1");
  if (world_file && !std::filesystem::exists(*world_file)) {
    throw ConfigError("world_file does not exist: " + world_file->string());
  }
  if (joy_script && !std::filesystem::exists(*joy_script)) {
    throw ConfigError("joy_script does not exist: " + joy_script->string());
  }
}

BringupConfig parse_config(std::string_view yaml, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml));
  } catch (const YAML::ParserException& e) {
    throw ConfigError("config line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }

  BringupConfig cfg;
  auto& p = cfg.plant;
  auto& t = cfg.teleop;
  auto& f = cfg.firmware;

  const Handlers lidar{
      {"preset",
       [&](const YAML::Node& n) {
         const auto v = scalar<std::string>(n, "plant.lidar.preset", "neato or ydlidar");
         if (v == "neato") p.lidar = plant::LidarConfig::neato();
         else if (v == "ydlidar") p.lidar = plant::LidarConfig::ydlidar();
         else fail_at(n, "plant.lidar.preset: expected neato or ydlidar, got '" + v + "'");
       }},
      {"rate_hz", num(p.lidar.rate_hz, "plant.lidar.rate_hz")},
      {"range_max", num(p.lidar.range_max, "plant.lidar.range_max")},
  };
  const Handlers plant_keys{
      {"wheel_radius", num(p.wheel_radius, "plant.wheel_radius")},
      {"v_max", num(p.v_max, "plant.v_max")},
      {"wheelbase", num(p.wheelbase, "plant.wheelbase")},
      {"steer_limit", num(p.steer_limit, "plant.steer_limit")},
      {"drive_gear_ratio", num(p.drive_gear_ratio, "plant.drive_gear_ratio")},
      {"steer_gear_ratio", num(p.steer_gear_ratio, "plant.steer_gear_ratio")},
      {"encoder_ppr", num(p.encoder_ppr, "plant.encoder_ppr")},
      {"drive_time_constant", num(p.drive_time_constant, "plant.drive_time_constant")},
      {"steer_rate_gain", num(p.steer_rate_gain, "plant.steer_rate_gain")},
      {"v_bat_drive", num(p.v_bat_drive, "plant.v_bat_drive")},
      {"v_bat_steer", num(p.v_bat_steer, "plant.v_bat_steer")},
      {"imu_rate_hz", num(p.imu_rate_hz, "plant.imu_rate_hz")},
      {"camera_rate_hz", num(p.camera_rate_hz, "plant.camera_rate_hz")},
      {"lidar", [&](const YAML::Node& n) { visit_map(n, "plant.lidar", lidar); }},
  };
  const Handlers teleop_keys{
      {"steering_axis", num(t.steering_axis, "teleop.steering_axis")},
      {"throttle_axis", num(t.throttle_axis, "teleop.throttle_axis")},
      {"deadzone", num(t.deadzone, "teleop.deadzone")},
      {"steering_scale", num(t.steering_scale, "teleop.steering_scale")},
      {"throttle_scale", num(t.throttle_scale, "teleop.throttle_scale")},
      {"invert_steering", flag(t.invert_steering, "teleop.invert_steering")},
      {"publish_rate", num(t.publish_rate, "teleop.publish_rate")},
      {"silence_timeout", num(t.silence_timeout, "teleop.silence_timeout")},
  };
  const Handlers firmware_keys{
      {"publish_period", num(f.publish_period, "firmware.publish_period")},
      {"heartbeat_period", num(f.heartbeat_period, "firmware.heartbeat_period")},
      {"watchdog_timeout", num(f.watchdog_timeout, "firmware.watchdog_timeout")},
      {"i2c_latency_ticks",
       [&](const YAML::Node& n) {
         const int v = scalar<int>(n, "firmware.i2c_latency_ticks", "an integer");
         if (v < 0 || v > 255) fail_at(n, "firmware.i2c_latency_ticks must lie in [0, 255]");
         f.i2c_latency_ticks = static_cast<std::uint8_t>(v);
       }},
  };
  const Handlers link_keys{
      {"latency", num(cfg.link.latency, "link.latency")},
      {"drop_probability", num(cfg.link.drop_probability, "link.drop_probability")},
  };
  daq::RecordingConfig rec;
  rec.topics = default_record_topics();
  const Handlers daq_keys{
      {"topics",
       [&](const YAML::Node& n) {
         if (!n.IsSequence()) fail_at(n, "daq.topics: expected a list of topic names");
         rec.topics.clear();
         for (const auto& item : n) rec.topics.push_back(scalar<std::string>(item, "daq.topics", "a topic name"));
       }},
      {"output_dir",
       [&](const YAML::Node& n) { rec.output_dir = scalar<std::string>(n, "daq.output_dir", "a path"); }},
      {"session_name",
       [&](const YAML::Node& n) { rec.session_name = scalar<std::string>(n, "daq.session_name", "a string"); }},
      {"flush_interval", num(rec.flush_interval, "daq.flush_interval")},
  };

  const Handlers top{
      {"plant", [&](const YAML::Node& n) { visit_map(n, "plant", plant_keys); }},
      {"teleop", [&](const YAML::Node& n) { visit_map(n, "teleop", teleop_keys); }},
      {"firmware", [&](const YAML::Node& n) { visit_map(n, "firmware", firmware_keys); }},
      {"link", [&](const YAML::Node& n) { visit_map(n, "link", link_keys); }},
      {"daq",
       [&](const YAML::Node& n) {
         visit_map(n, "daq", daq_keys);
         cfg.daq = rec;
       }},
      {"world_file", path_field(cfg.world_file, base_dir, "world_file")},
      {"joy_script", path_field(cfg.joy_script, base_dir, "joy_script")},
      {"bridge_port",
       [&](const YAML::Node& n) {
         const long v = scalar<long>(n, "bridge_port", "a port number");
         if (v < 0 || v > std::numeric_limits<std::uint16_t>::max()) {
           fail_at(n, "bridge_port must lie in [0, 65535]");
         }
         cfg.bridge_port = static_cast<std::uint16_t>(v);
       }},
      {"realtime", flag(cfg.realtime, "realtime")},
      {"seed", num(cfg.seed, "seed")},
      {"duration", num(cfg.duration, "duration")},
      {"queue_depth",
       [&](const YAML::Node& n) {
         const long v = scalar<long>(n, "queue_depth", "an integer");
         if (v < 1 || v > std::numeric_limits<std::uint16_t>::max()) {
           fail_at(n, "queue_depth must lie in [1, 65535]");
         }
         cfg.queue_depth = static_cast<std::uint16_t>(v);
       }},
  };
  visit_map(root, "", top);
  cfg.validate();
  return cfg;
}

BringupConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

}  // namespace mir::cli
