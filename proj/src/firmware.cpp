#include "mir/firmware.hpp"

#include <algorithm>
#include <cmath>

#include "mir/error.hpp"

namespace mir::firmware {

namespace {

// Position of each phase state along the forward sequence 00, 01, 11, 10.
constexpr int gray_index(PhasePair p) {
  const int code = ((p.a & 1) << 1) | (p.b & 1);
  constexpr int kIndex[4] = {0, 1, 3, 2};
  return kIndex[code];
}

}  // namespace

StepResult quad_step(PhasePair prev, PhasePair curr) {
  const int diff = (gray_index(curr) - gray_index(prev) + 4) % 4;
  switch (diff) {
    case 0: return {0, false};
    case 1: return {+1, false};
    case 3: return {-1, false};
    default: return {0, true};
  }
}

void QuadratureDecoder::step(PhasePair curr) {
  const StepResult r = quad_step(prev_, curr);
  count_ += r.delta;
  if (r.invalid) ++invalid_;
  prev_ = curr;
}

HBridgeOutput to_hbridge(const PwmCommand& cmd) {
  const double duty = std::clamp(cmd.duty, -1.0, 1.0);
  const auto level = static_cast<std::uint8_t>(std::lround(std::abs(duty) * 255.0));
  HBridgeOutput out;
  out.enable = true;
  if (duty > 0.0) out.pwma = level;
  if (duty < 0.0) out.pwmb = level;
  return out;
}

wire::Bytes TickOutput::serial_bytes() const {
  wire::Bytes out;
  for (const auto* f : {&encoder_pulse, &heartbeat}) {
    if (!f->has_value()) continue;
    const wire::Bytes b = wire::encode_frame(**f);
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

ControlUnit::ControlUnit(ControlUnitConfig cfg) : cfg_(cfg) {
  if (!(cfg.tick_period > 0.0) || !(cfg.publish_period > 0.0) || !(cfg.heartbeat_period > 0.0) ||
      !(cfg.watchdog_timeout > 0.0)) {
    throw InvalidArgument("control unit periods must be positive");
  }
  publish_every_ = std::max<std::uint64_t>(1, std::llround(cfg.publish_period / cfg.tick_period));
  heartbeat_every_ =
      std::max<std::uint64_t>(1, std::llround(cfg.heartbeat_period / cfg.tick_period));
  i2c_.assign(cfg.i2c_latency_ticks, 0);
}

void ControlUnit::on_serial_bytes(std::span<const std::uint8_t> bytes, Timestamp now) {
  for (const wire::Frame& f : serial_rx_.feed(bytes)) {
    if (f.topic_id != wire::topic_id::kVehicleControl) {
      ++counters_.malformed_count;
      continue;
    }
    try {
      handle_vehicle_control(std::get<msgs::VehicleControl>(wire::decode_payload(f)), now);
    } catch (const DecodeError&) {
      ++counters_.malformed_count;
    }
  }
}

bool ControlUnit::handle_vehicle_control(const msgs::VehicleControl& msg, Timestamp now) {
  if (!std::isfinite(msg.steering) || !std::isfinite(msg.throttle)) {
    ++counters_.malformed_count;
    return false;
  }
  if (last_seq_ && msg.seq <= *last_seq_) {
    ++counters_.stale_count;
    return false;
  }
  msgs::VehicleControl accepted = msg;
  accepted.steering = std::clamp(msg.steering, -1.0, 1.0);
  accepted.throttle = std::clamp(msg.throttle, -1.0, 1.0);
  if (accepted.steering != msg.steering || accepted.throttle != msg.throttle) {
    ++counters_.clamp_count;
  }
  last_control_ = accepted;
  last_seq_ = msg.seq;
  watchdog_deadline_ = now + cfg_.watchdog_timeout;
  ++counters_.accepted;
  return true;
}

TickOutput ControlUnit::tick(std::span<const PhasePair> steer_edges,
                             std::span<const PhasePair> drive_edges, Timestamp now) {
  ++ticks_;

  // Slave decodes its encoder, then the count travels over I2C.
  drive_.step(drive_edges);
  i2c_.push_back(drive_.count());
  drive_view_ = i2c_.front();
  i2c_.pop_front();

  steer_.step(steer_edges);

  TickOutput out;
  if (now <= watchdog_deadline_) {
    out.pwm.steer.duty = last_control_.steering;
    out.pwm.drive.duty = last_control_.throttle;
  }

  if (ticks_ % publish_every_ == 0) {
    msgs::EncoderPulse p;
    p.drive_count = drive_view_;
    p.steer_count = steer_.count();
    p.stamp = now;
    p.seq = pulse_seq_++;
    out.encoder_pulse = wire::make_frame(wire::topic_id::kEncoderPulse, p);
  }
  if (ticks_ % heartbeat_every_ == 0) {
    msgs::Heartbeat h;
    h.frames_ok = serial_rx_.counters().frames_ok;
    h.frames_bad_checksum = serial_rx_.counters().frames_bad_checksum;
    h.invalid_transitions = invalid_transitions();
    h.clamp_count = counters_.clamp_count;
    h.stale_count = counters_.stale_count;
    h.malformed_count = counters_.malformed_count;
    h.stamp = now;
    out.heartbeat = wire::make_frame(wire::topic_id::kHeartbeat, h);
  }
  return out;
}

}  // namespace mir::firmware
