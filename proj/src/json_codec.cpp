#include "mir/json_codec.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

#include "mir/error.hpp"

namespace mir::cli {

namespace {

using nlohmann::json;

json vec3(const msgs::Vector3& v) { return {{"x", v.x}, {"y", v.y}, {"z", v.z}}; }

}  // namespace

json to_json(const msgs::Message& msg) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, msgs::VehicleControl>) {
          return {{"steering", m.steering}, {"throttle", m.throttle}, {"stamp", m.stamp.sec}, {"seq", m.seq}};
        } else if constexpr (std::is_same_v<T, msgs::EncoderPulse>) {
          return {{"drive_count", m.drive_count}, {"steer_count", m.steer_count},
                  {"stamp", m.stamp.sec}, {"seq", m.seq}};
        } else if constexpr (std::is_same_v<T, msgs::ImuSample>) {
          return {{"accel", vec3(m.accel)},
                  {"gyro", vec3(m.gyro)},
                  {"mag", vec3(m.mag)},
                  {"orientation",
                   {{"w", m.orientation.w}, {"x", m.orientation.x}, {"y", m.orientation.y}, {"z", m.orientation.z}}},
                  {"frame", m.frame == msgs::ImuFrame::kRazor ? "razor" : "rep103"},
                  {"stamp", m.stamp.sec}};
        } else if constexpr (std::is_same_v<T, msgs::LaserScan>) {
          json valid = json::array();
          for (auto v : m.valid) valid.push_back(v != 0);
          return {{"angle_min", m.angle_min}, {"angle_increment", m.angle_increment},
                  {"ranges", m.ranges},       {"range_max", m.range_max},
                  {"valid", valid},           {"stamp", m.stamp.sec}};
        } else if constexpr (std::is_same_v<T, msgs::Heartbeat>) {
          return {{"frames_ok", m.frames_ok},
                  {"frames_bad_checksum", m.frames_bad_checksum},
                  {"invalid_transitions", m.invalid_transitions},
                  {"clamp_count", m.clamp_count},
                  {"stale_count", m.stale_count},
                  {"malformed_count", m.malformed_count},
                  {"stamp", m.stamp.sec}};
        } else if constexpr (std::is_same_v<T, msgs::JoyState>) {
          return {{"axes", m.axes}, {"buttons", m.buttons}, {"stamp", m.stamp.sec}};
        } else {
          return {{"frame_counter", m.frame_counter}, {"stamp", m.stamp.sec}};
        }
      },
      msg);
}

msgs::JoyState joy_from_json(const json& j, Timestamp stamp) {
  if (!j.is_object()) throw InvalidArgument("joy message must be an object");
  msgs::JoyState joy;
  joy.stamp = stamp;
  if (j.contains("axes")) {
    const auto& axes = j.at("axes");
    if (!axes.is_array()) throw InvalidArgument("joy.axes must be an array");
    for (const auto& a : axes) {
      if (!a.is_number()) throw InvalidArgument("joy.axes entries must be numbers");
      const double v = a.get<double>();
      if (!std::isfinite(v)) throw InvalidArgument("joy.axes entries must be finite");
      joy.axes.push_back(std::clamp(v, -1.0, 1.0));
    }
  }
  if (j.contains("buttons")) {
    const auto& buttons = j.at("buttons");
    if (!buttons.is_array()) throw InvalidArgument("joy.buttons must be an array");
    for (const auto& b : buttons) {
      if (!b.is_number() && !b.is_boolean()) throw InvalidArgument("joy.buttons entries must be 0/1");
      joy.buttons.push_back(b.is_boolean() ? b.get<bool>() : (b.get<double>() != 0.0));
    }
  }
  return joy;
}

msgs::VehicleControl control_from_json(const json& j, Timestamp stamp) {
  if (!j.is_object()) throw InvalidArgument("vehicle_control message must be an object");
  msgs::VehicleControl c;
  for (auto [key, field] : {std::pair{"steering", &c.steering}, std::pair{"throttle", &c.throttle}}) {
    if (!j.contains(key)) continue;
    if (!j.at(key).is_number()) throw InvalidArgument(std::string("vehicle_control.") + key + " must be a number");
    *field = j.at(key).get<double>();
  }
  c.stamp = stamp;
  return c;
}

}  // namespace mir::cli
