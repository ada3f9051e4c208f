#pragma once

// JSON form of bus messages, used by the WebSocket bridge.

#include <nlohmann/json.hpp>

#include "mir/msgs.hpp"

namespace mir::cli {

nlohmann::json to_json(const msgs::Message& msg);

// Reads {"axes":[...],"buttons":[...]}; missing arrays are empty. Axis
// values outside [-1, 1] are clamped. Throws InvalidArgument on bad types.
msgs::JoyState joy_from_json(const nlohmann::json& j, Timestamp stamp);

// Reads {"steering":x,"throttle":y}. Throws InvalidArgument on bad types.
msgs::VehicleControl control_from_json(const nlohmann::json& j, Timestamp stamp);

}  // namespace mir::cli
