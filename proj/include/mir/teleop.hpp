#pragma once

// joy2vehicle: joystick state -> normalized vehicle command.

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string_view>
#include <vector>

#include "mir/bus.hpp"
#include "mir/msgs.hpp"

namespace mir::teleop {

struct TeleopConfig {
  std::size_t steering_axis = 0;
  std::size_t throttle_axis = 1;
  double deadzone = 0.05;
  double steering_scale = 1.0;
  double throttle_scale = 1.0;
  bool invert_steering = false;
  double publish_rate = 20.0;   // Hz
  double silence_timeout = 1.0; // s without joystick input before going neutral

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Deadzone with re-normalization: |a| <= deadzone maps to 0, full deflection
// maps to +-scale, linear in between.
double shape_axis(double value, double deadzone, double scale);

// Throws InvalidArgument naming the missing axis index.
msgs::VehicleControl joy_to_vehicle(const msgs::JoyState& joy, const TeleopConfig& cfg);

// The joy2vehicle node. Joystick input and the periodic publisher may run in
// different threads; they share only the latest JoyState.
class Joy2Vehicle {
 public:
  static constexpr std::string_view kNodeName = "joy2vehicle";

  Joy2Vehicle(bus::Bus& bus, TeleopConfig cfg);
  ~Joy2Vehicle();
  Joy2Vehicle(const Joy2Vehicle&) = delete;
  Joy2Vehicle& operator=(const Joy2Vehicle&) = delete;

  // Latest-value input. `now` is the simulation time the state was received.
  void on_joy(const msgs::JoyState& joy, Timestamp now);

  // The joystick source went away. Output goes neutral until input resumes.
  void on_disconnect(Timestamp now);

  // Pulls pending /joy messages and publishes a command when one is due.
  // Returns the command published this call, if any.
  std::optional<msgs::VehicleControl> spin_once(Timestamp now);

  void shutdown();

  std::uint64_t published() const { return seq_; }
  std::uint64_t mapping_errors() const { return mapping_errors_; }
  std::uint64_t disconnect_events() const { return disconnects_; }

 private:
  bus::Bus& bus_;
  TeleopConfig cfg_;
  bus::NodeHandle node_;
  bus::Subscription joy_sub_;
  bus::Publisher pub_;
  bool alive_ = true;

  mutable std::mutex mu_;
  std::optional<msgs::JoyState> latest_;
  Timestamp last_input_{0.0};
  bool connected_ = true;

  std::uint64_t ticks_ = 0;
  std::optional<double> next_publish_;
  std::uint32_t seq_ = 0;
  std::uint64_t mapping_errors_ = 0;
  std::uint64_t disconnects_ = 0;
};

// Arrow / WASD keyboard fallback producing a synthetic JoyState.
struct KeyboardState {
  bool left = false;
  bool right = false;
  bool forward = false;
  bool reverse = false;
};

msgs::JoyState keyboard_to_joy(const KeyboardState& keys, Timestamp stamp);

// Scripted joystick input, one event per line:
//   <t> <steering_axis> <throttle_axis>
//   <t> disconnect
// '#' starts a comment. Events must be in non-decreasing time order.
struct JoyEvent {
  double t = 0.0;
  bool disconnect = false;
  double steering = 0.0;
  double throttle = 0.0;
};

std::vector<JoyEvent> parse_joy_script(std::string_view text);
std::vector<JoyEvent> load_joy_script(const std::filesystem::path& path);

// Linux joystick API (js_event) decoding. The device reader is only built on
// Linux; the decoder is platform independent.
struct JsEvent {
  std::uint32_t time_ms = 0;
  std::int16_t value = 0;
  std::uint8_t type = 0;
  std::uint8_t number = 0;
};

inline constexpr std::uint8_t kJsEventButton = 0x01;
inline constexpr std::uint8_t kJsEventAxis = 0x02;
inline constexpr std::uint8_t kJsEventInit = 0x80;

// Folds one event into `state`, growing axes/buttons as needed. Axis values
// are normalized to [-1, 1]; the driver's y axes are negated so that pushing
// the stick forward is positive throttle.
void apply_js_event(const JsEvent& ev, msgs::JoyState& state);

class JoystickDevice {
 public:
  // Opens the device non-blocking. Throws IoError when it cannot be opened.
  explicit JoystickDevice(const std::filesystem::path& path);
  ~JoystickDevice();
  JoystickDevice(const JoystickDevice&) = delete;
  JoystickDevice& operator=(const JoystickDevice&) = delete;

  // Drains pending events into the internal state. Returns false once the
  // device has gone away.
  bool poll();
  const msgs::JoyState& state() const { return state_; }

 private:
  int fd_ = -1;
  msgs::JoyState state_;
};

}  // namespace mir::teleop
