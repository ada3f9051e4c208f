#include "mir/teleop.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "mir/error.hpp"
#include "mir/log.hpp"

namespace mir::teleop {

void TeleopConfig::validate() const {
  if (!(deadzone >= 0.0 && deadzone < 0.5)) throw ConfigError("teleop.deadzone must lie in [0, 0.5)");
  if (!(steering_scale > 0.0 && steering_scale <= 1.0)) {
    throw ConfigError("teleop.steering_scale must lie in (0, 1]");
  }
  if (!(throttle_scale > 0.0 && throttle_scale <= 1.0)) {
    throw ConfigError("teleop.throttle_scale must lie in (0, 1]");
  }
  if (!(publish_rate > 0.0)) throw ConfigError("teleop.publish_rate must be positive");
  if (!(silence_timeout > 0.0)) throw ConfigError("teleop.silence_timeout must be positive");
}

double shape_axis(double value, double deadzone, double scale) {
  const double a = std::clamp(value, -1.0, 1.0);
  const double mag = std::abs(a);
  if (mag <= deadzone) return 0.0;
  const double out = (mag - deadzone) / (1.0 - deadzone) * scale;
  return std::copysign(std::min(out, 1.0), a);
}

msgs::VehicleControl joy_to_vehicle(const msgs::JoyState& joy, const TeleopConfig& cfg) {
  auto axis = [&](std::size_t index) {
    if (index >= joy.axes.size()) {
      throw InvalidArgument("joy_to_vehicle: joystick has no axis " + std::to_string(index));
    }
    const double v = joy.axes[index];
    if (!std::isfinite(v)) {
      throw InvalidArgument("joy_to_vehicle: axis " + std::to_string(index) + " is not finite");
    }
    return v;
  };
  msgs::VehicleControl out;
  out.steering = shape_axis(axis(cfg.steering_axis), cfg.deadzone, cfg.steering_scale);
  out.throttle = shape_axis(axis(cfg.throttle_axis), cfg.deadzone, cfg.throttle_scale);
  if (cfg.invert_steering) out.steering = -out.steering;
  out.stamp = joy.stamp;
  return out;
}

Joy2Vehicle::Joy2Vehicle(bus::Bus& bus, TeleopConfig cfg)
    : bus_(bus),
      cfg_((cfg.validate(), cfg)),
      node_(bus.create_node(std::string(kNodeName))),
      joy_sub_(bus.subscribe(node_, bus::topics::kJoy, 1)),
      pub_(bus.advertise(node_, {std::string(bus::topics::kVehicleControl),
                                 msgs::SchemaId::kVehicleControl, false})) {}

Joy2Vehicle::~Joy2Vehicle() { shutdown(); }

void Joy2Vehicle::shutdown() {
  if (!alive_) return;
  alive_ = false;
  bus_.shutdown_node(node_);
}

void Joy2Vehicle::on_joy(const msgs::JoyState& joy, Timestamp now) {
  std::lock_guard lock(mu_);
  latest_ = joy;
  last_input_ = now;
  connected_ = true;
}

void Joy2Vehicle::on_disconnect(Timestamp now) {
  std::lock_guard lock(mu_);
  if (connected_) {
    ++disconnects_;
    spdlog::warn("joy2vehicle: joystick source disconnected at t={:.3f}, holding neutral", now.sec);
  }
  connected_ = false;
  latest_.reset();
}

std::optional<msgs::VehicleControl> Joy2Vehicle::spin_once(Timestamp now) {
  if (!alive_) return std::nullopt;
  for (const auto& env : joy_sub_.drain()) {
    const auto& joy = std::get<msgs::JoyState>(env.msg);
    on_joy(joy, joy.stamp);
  }

  const double period = 1.0 / cfg_.publish_rate;
  if (!next_publish_) next_publish_ = now.sec;
  if (now.sec + 1e-9 < *next_publish_) return std::nullopt;
  ++ticks_;
  next_publish_ = *next_publish_ + period;

  std::optional<msgs::JoyState> joy;
  {
    std::lock_guard lock(mu_);
    if (connected_ && latest_ && now - last_input_ <= cfg_.silence_timeout) joy = latest_;
  }

  msgs::VehicleControl cmd;
  if (joy) {
    try {
      cmd = joy_to_vehicle(*joy, cfg_);
    } catch (const InvalidArgument& e) {
      ++mapping_errors_;
      spdlog::warn("joy2vehicle: {}", e.what());
      cmd = {};
    }
  }
  cmd.stamp = now;
  cmd.seq = seq_++;
  pub_.publish(cmd);
  return cmd;
}

msgs::JoyState keyboard_to_joy(const KeyboardState& keys, Timestamp stamp) {
  msgs::JoyState j;
  j.axes = {static_cast<double>(keys.left) - static_cast<double>(keys.right),
            static_cast<double>(keys.forward) - static_cast<double>(keys.reverse)};
  j.stamp = stamp;
  return j;
}

std::vector<JoyEvent> parse_joy_script(std::string_view text) {
  std::vector<JoyEvent> events;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& why) {
    throw ConfigError("joy script line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    JoyEvent ev;
    if (!(fields >> ev.t)) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) fail("expected a time stamp");
      continue;
    }
    if (!std::isfinite(ev.t) || ev.t < 0.0) fail("time must be finite and non-negative");
    std::string first;
    if (!(fields >> first)) fail("expected 'disconnect' or two axis values");
    if (first == "disconnect") {
      ev.disconnect = true;
    } else {
      try {
        ev.steering = std::stod(first);
      } catch (const std::exception&) {
        fail("bad steering value '" + first + "'");
      }
      if (!(fields >> ev.throttle)) fail("expected a throttle value");
      if (!(std::abs(ev.steering) <= 1.0) || !(std::abs(ev.throttle) <= 1.0)) {
        fail("axis values must lie in [-1, 1]");
      }
    }
    std::string extra;
    if (fields >> extra) fail("unexpected trailing field '" + extra + "'");
    if (!events.empty() && ev.t < events.back().t) fail("events out of time order");
    events.push_back(ev);
  }
  return events;
}

std::vector<JoyEvent> load_joy_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("joy script not found: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_joy_script(buf.str());
}

void apply_js_event(const JsEvent& ev, msgs::JoyState& state) {
  const auto type = static_cast<std::uint8_t>(ev.type & ~kJsEventInit);
  if (type == kJsEventAxis) {
    if (state.axes.size() <= ev.number) state.axes.resize(ev.number + 1, 0.0);
    // The js driver reports stick-left and stick-forward as negative values.
    const double v = std::clamp(static_cast<double>(ev.value) / 32767.0, -1.0, 1.0);
    state.axes[ev.number] = 0.0 - v;
  } else if (type == kJsEventButton) {
    if (state.buttons.size() <= ev.number) state.buttons.resize(ev.number + 1, 0);
    state.buttons[ev.number] = ev.value != 0 ? 1 : 0;
  }
}

JoystickDevice::JoystickDevice(const std::filesystem::path& path) {
  fd_ = ::open(path.c_str(), O_RDONLY | O_NONBLOCK);
  if (fd_ < 0) {
    throw IoError("cannot open joystick " + path.string() + ": " + std::strerror(errno));
  }
}

JoystickDevice::~JoystickDevice() {
  if (fd_ >= 0) ::close(fd_);
}

bool JoystickDevice::poll() {
  if (fd_ < 0) return false;
  // struct js_event from <linux/joystick.h>: u32 time, s16 value, u8 type, u8 number.
  unsigned char raw[8];
  for (;;) {
    const ssize_t n = ::read(fd_, raw, sizeof raw);
    if (n == static_cast<ssize_t>(sizeof raw)) {
      JsEvent ev;
      std::memcpy(&ev.time_ms, raw, 4);
      std::memcpy(&ev.value, raw + 4, 2);
      ev.type = raw[6];
      ev.number = raw[7];
      apply_js_event(ev, state_);
      continue;
    }
    if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) return true;
    ::close(fd_);
    fd_ = -1;
    return false;
  }
}

}  // namespace mir::teleop
