#include "mir/bringup.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include "mir/error.hpp"
#include "mir/log.hpp"
#include "mir/rotation.hpp"
#include "mir/sensors.hpp"

namespace mir::cli {

namespace {

std::uint64_t every(double rate_hz, double dt) {
  return std::max<std::uint64_t>(1, std::llround(1.0 / (rate_hz * dt)));
}

bus::TopicSpec spec(std::string_view topic) {
  return {std::string(topic), *bus::canonical_schema(topic), false};
}

}  // namespace

JoySource::JoySource(bus::Bus& bus, std::vector<teleop::JoyEvent> script, double autorepeat_hz)
    : bus_(bus),
      node_(bus.create_node(std::string(kNodeName))),
      pub_(bus.advertise(node_, spec(bus::topics::kJoy))),
      script_(std::move(script)),
      repeat_period_(1.0 / autorepeat_hz) {}

JoySource::~JoySource() { shutdown(); }

void JoySource::shutdown() {
  if (!alive_) return;
  alive_ = false;
  bus_.shutdown_node(node_);
}

void JoySource::inject(const msgs::JoyState& joy) {
  std::lock_guard lock(mu_);
  injected_.push_back(joy);
}

void JoySource::emit(msgs::JoyState joy, Timestamp now) {
  joy.stamp = now;
  pub_.publish(joy);
  latest_ = std::move(joy);
  last_emit_ = now.sec;
}

void JoySource::spin_once(Timestamp now) {
  if (!alive_) return;
  bool emitted = false;
  while (next_event_ < script_.size() && script_[next_event_].t <= now.sec + 1e-9) {
    const auto& ev = script_[next_event_++];
    if (ev.disconnect) {
      latest_.reset();
      continue;
    }
    msgs::JoyState joy;
    joy.axes = {ev.steering, ev.throttle};
    emit(std::move(joy), now);
    emitted = true;
  }
  std::vector<msgs::JoyState> injected;
  {
    std::lock_guard lock(mu_);
    injected.swap(injected_);
  }
  for (auto& joy : injected) {
    emit(std::move(joy), now);
    emitted = true;
  }
  if (!emitted && latest_ && now.sec - last_emit_ + 1e-9 >= repeat_period_) {
    emit(*latest_, now);
  }
}

SerialNode::SerialNode(bus::Bus& bus, std::uint16_t queue_depth)
    : bus_(bus),
      node_(bus.create_node(std::string(kNodeName))),
      control_sub_(bus.subscribe(node_, bus::topics::kVehicleControl, queue_depth)),
      pulse_pub_(bus.advertise(node_, spec(bus::topics::kEncoderPulse))),
      heartbeat_pub_(bus.advertise(node_, spec(bus::topics::kHeartbeat))) {}

SerialNode::~SerialNode() { shutdown(); }

void SerialNode::shutdown() {
  if (!alive_) return;
  alive_ = false;
  bus_.shutdown_node(node_);
}

void SerialNode::forward_commands(wire::BytePipe& to_mcu, Timestamp now) {
  for (const auto& env : control_sub_.drain()) {
    to_mcu.write(wire::encode_frame(wire::make_frame(wire::topic_id::kVehicleControl, env.msg)), now);
  }
}

void SerialNode::receive(wire::BytePipe& from_mcu, Timestamp now) {
  const auto bytes = from_mcu.read(now);
  if (bytes.empty() || !alive_) return;
  for (const auto& frame : rx_.feed(bytes)) {
    try {
      const msgs::Message msg = wire::decode_payload(frame);
      if (frame.topic_id == wire::topic_id::kEncoderPulse) {
        pulse_pub_.publish(msg);
      } else if (frame.topic_id == wire::topic_id::kHeartbeat) {
        heartbeat_pub_.publish(msg);
      } else {
        ++decode_errors_;
      }
    } catch (const DecodeError& e) {
      ++decode_errors_;
      spdlog::warn("serial_node: {}", e.what());
    }
  }
}

SimSession::SimSession(BringupConfig cfg, BringupOptions opts)
    : cfg_(std::move(cfg)),
      dt_(cfg_.firmware.tick_period),
      world_([&] {
        cfg_.validate();
        return cfg_.world_file ? plant::load_world(*cfg_.world_file) : plant::WorldModel{};
      }()),
      plant_(cfg_.plant),
      mcu_(cfg_.firmware),
      host_to_mcu_(cfg_.link, cfg_.seed),
      mcu_to_host_(cfg_.link, cfg_.seed + 1) {
  const auto script = cfg_.joy_script ? teleop::load_joy_script(*cfg_.joy_script)
                                      : std::vector<teleop::JoyEvent>{};
  joy_ = std::make_unique<JoySource>(bus_, script);
  teleop_ = std::make_unique<teleop::Joy2Vehicle>(bus_, cfg_.teleop);
  serial_ = std::make_unique<SerialNode>(bus_, cfg_.queue_depth);

  imu_node_ = bus_.create_node("imu");
  imu_pub_ = bus_.advertise(*imu_node_, spec(bus::topics::kImu));
  lidar_node_ = bus_.create_node("lidar");
  scan_pub_ = bus_.advertise(*lidar_node_, spec(bus::topics::kScan));
  camera_node_ = bus_.create_node("camera");
  camera_pub_ = bus_.advertise(*camera_node_, spec(bus::topics::kCamera));
  imu_every_ = every(cfg_.plant.imu_rate_hz, dt_);
  lidar_every_ = every(cfg_.plant.lidar.rate_hz, dt_);
  camera_every_ = every(cfg_.plant.camera_rate_hz, dt_);

  if (opts.record && !cfg_.daq) {
    cfg_.daq = daq::RecordingConfig{};
    cfg_.daq->topics = default_record_topics();
  }
  if (cfg_.daq) recorder_ = std::make_unique<daq::Recorder>(bus_, *cfg_.daq, now());

  if (!opts.headless) {
    bridge_ = std::make_unique<Bridge>(
        bus_, cfg_.bridge_port, [this](const msgs::JoyState& j) { joy_->inject(j); },
        [this] { return Timestamp{clock_.load()}; });
  }
}

SimSession::~SimSession() {
  try {
    shutdown();
  } catch (const std::exception& e) {
    spdlog::error("shutdown: {}", e.what());
  }
}

void SimSession::stop_teleop() {
  if (teleop_) teleop_->shutdown();
}

void SimSession::step() {
  if (shut_down_) throw InvalidState("step: session is shut down");
  ++ticks_;
  const Timestamp t = now();
  clock_.store(t.sec);

  joy_->spin_once(t);
  teleop_->spin_once(t);
  serial_->forward_commands(host_to_mcu_, t);

  mcu_.on_serial_bytes(host_to_mcu_.read(t), t);
  const firmware::TickOutput out = mcu_.tick(plant_.steer_edges(), plant_.drive_edges(), t);
  last_pwm_ = out.pwm;
  mcu_to_host_.write(out.serial_bytes(), t);

  plant_.step(out.pwm, dt_);
  serial_->receive(mcu_to_host_, t);

  if (ticks_ % imu_every_ == 0) {
    imu_pub_->publish(msgs::imu_to_rep103(plant::sample_imu(plant_.previous(), plant_.state(), dt_)));
  }
  if (ticks_ % lidar_every_ == 0) {
    const auto& s = plant_.state();
    scan_pub_->publish(plant::scan_lidar(world_, {s.x, s.y, s.heading}, cfg_.plant.lidar, t));
  }
  if (ticks_ % camera_every_ == 0) {
    camera_pub_->publish(msgs::CameraStub{camera_frames_++, t});
  }

  if (recorder_) recorder_->spin_once(t);
}

void SimSession::run_for(double seconds) {
  const auto n = static_cast<std::uint64_t>(std::llround(seconds / dt_));
  for (std::uint64_t i = 0; i < n; ++i) step();
}

void SimSession::run(const std::atomic<bool>& stop) {
  const auto wall_start = std::chrono::steady_clock::now();
  const std::uint64_t start_tick = ticks_;
  const auto limit = cfg_.duration > 0.0 ? static_cast<std::uint64_t>(std::llround(cfg_.duration / dt_))
                                         : std::numeric_limits<std::uint64_t>::max();
  while (!stop.load() && ticks_ - start_tick < limit) {
    step();
    if (cfg_.realtime) {
      const auto target = wall_start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                           std::chrono::duration<double>((ticks_ - start_tick) * dt_));
      std::this_thread::sleep_until(target);
    }
  }
}

void SimSession::shutdown() {
  if (shut_down_) return;
  shut_down_ = true;
  if (bridge_) bridge_->stop();
  if (recorder_) manifest_ = recorder_->stop(now());
  recorder_.reset();
  bridge_.reset();
  joy_->shutdown();
  teleop_->shutdown();
  serial_->shutdown();
  for (auto* n : {&imu_node_, &lidar_node_, &camera_node_}) {
    if (*n) bus_.shutdown_node(**n);
  }
}

}  // namespace mir::cli
