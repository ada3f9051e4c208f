#pragma once

// Emulation of the two-microcontroller motor control unit. The I2C slave
// decodes the drive encoder; the master decodes the steering encoder, drives
// both H-bridges and runs the serial endpoint to the host.

#include <cstdint>
#include <deque>
#include <optional>
#include <span>

#include "mir/msgs.hpp"
#include "mir/wire.hpp"

namespace mir::firmware {

// Encoder channel levels. Forward rotation produces (a,b) = 00 -> 01 -> 11 -> 10 -> 00.
struct PhasePair {
  std::uint8_t a = 0;
  std::uint8_t b = 0;

  bool operator==(const PhasePair&) const = default;
};

struct StepResult {
  int delta = 0;  // -1, 0 or +1
  bool invalid = false;

  bool operator==(const StepResult&) const = default;
};

// One transition of the 4x decoding state table. Double transitions
// (00 <-> 11, 01 <-> 10) lose direction and are flagged invalid.
StepResult quad_step(PhasePair prev, PhasePair curr);

class QuadratureDecoder {
 public:
  explicit QuadratureDecoder(PhasePair initial = {}) : prev_(initial) {}

  void step(PhasePair curr);
  void step(std::span<const PhasePair> edges) {
    for (const auto& e : edges) step(e);
  }

  std::int64_t count() const { return count_; }
  std::uint64_t invalid_transitions() const { return invalid_; }
  PhasePair phase() const { return prev_; }

 private:
  PhasePair prev_;
  std::int64_t count_ = 0;
  std::uint64_t invalid_ = 0;
};

// Arduino pin assignment of one MegaMoto H-bridge (kept for reference only).
struct HBridgePins {
  std::uint8_t enable;
  std::uint8_t pwma;
  std::uint8_t pwmb;
  std::uint8_t sensor;  // analog pin number, A0 = 14
};

inline constexpr HBridgePins kSteerPins{8, 6, 5, 14};
inline constexpr HBridgePins kDrivePins{12, 9, 10, 15};

enum class Channel : std::uint8_t { kSteer, kDrive };

constexpr const HBridgePins& pins(Channel c) { return c == Channel::kSteer ? kSteerPins : kDrivePins; }

struct PwmCommand {
  Channel channel = Channel::kSteer;
  double duty = 0.0;  // sign selects PWMA (forward) or PWMB (reverse)

  bool operator==(const PwmCommand&) const = default;
};

// Register-level view of one H-bridge in dual-PWM mode: 8-bit analogWrite
// values on PWMA/PWMB with the other input held low.
struct HBridgeOutput {
  bool enable = false;
  std::uint8_t pwma = 0;
  std::uint8_t pwmb = 0;

  bool operator==(const HBridgeOutput&) const = default;
};

HBridgeOutput to_hbridge(const PwmCommand& cmd);

struct PwmPair {
  PwmCommand steer{Channel::kSteer, 0.0};
  PwmCommand drive{Channel::kDrive, 0.0};

  bool operator==(const PwmPair&) const = default;
};

struct ControlUnitConfig {
  double tick_period = 0.001;      // 1 kHz
  double publish_period = 0.02;    // /encoder_pulse at 50 Hz
  double heartbeat_period = 1.0;
  double watchdog_timeout = 0.5;
  std::uint8_t i2c_latency_ticks = 1;
};

struct ControlCounters {
  std::uint64_t accepted = 0;
  std::uint64_t clamp_count = 0;
  std::uint64_t stale_count = 0;
  std::uint64_t malformed_count = 0;
};

struct TickOutput {
  PwmPair pwm;
  std::optional<wire::Frame> encoder_pulse;
  std::optional<wire::Frame> heartbeat;

  // Encoded bytes of all frames produced this tick, ready for the serial line.
  wire::Bytes serial_bytes() const;
};

class ControlUnit {
 public:
  explicit ControlUnit(ControlUnitConfig cfg = {});

  // Serial ingress on the master. Frames that fail to decode are counted.
  void on_serial_bytes(std::span<const std::uint8_t> bytes, Timestamp now);

  // Returns true when the command was accepted.
  bool handle_vehicle_control(const msgs::VehicleControl& msg, Timestamp now);

  // One 1 kHz control cycle. `steer_edges` / `drive_edges` are the phase
  // states seen on each encoder since the previous tick, in order.
  TickOutput tick(std::span<const PhasePair> steer_edges, std::span<const PhasePair> drive_edges,
                  Timestamp now);

  const ControlUnitConfig& config() const { return cfg_; }
  std::int64_t steer_count() const { return steer_.count(); }
  std::int64_t drive_count() const { return drive_.count(); }  // slave's own count
  std::int64_t drive_count_master_view() const { return drive_view_; }
  std::uint64_t invalid_transitions() const {
    return steer_.invalid_transitions() + drive_.invalid_transitions();
  }
  const msgs::VehicleControl& last_control() const { return last_control_; }
  Timestamp watchdog_deadline() const { return watchdog_deadline_; }
  const ControlCounters& counters() const { return counters_; }
  const wire::DecoderCounters& link_counters() const { return serial_rx_.counters(); }
  std::uint64_t ticks() const { return ticks_; }

 private:
  ControlUnitConfig cfg_;
  std::uint64_t publish_every_;
  std::uint64_t heartbeat_every_;

  // master
  QuadratureDecoder steer_;
  msgs::VehicleControl last_control_;
  std::optional<std::uint32_t> last_seq_;
  Timestamp watchdog_deadline_{0.0};
  std::int64_t drive_view_ = 0;
  wire::StreamDecoder serial_rx_;
  std::uint32_t pulse_seq_ = 0;
  ControlCounters counters_;

  // slave, plus the I2C register pipeline between the two
  QuadratureDecoder drive_;
  std::deque<std::int64_t> i2c_;

  std::uint64_t ticks_ = 0;
};

}  // namespace mir::firmware
