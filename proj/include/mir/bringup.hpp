#pragma once

// Standard bringup: wires the simulated vehicle, the emulated control unit,
// the serial link and the host node graph, and drives them all from one
// simulation clock.
//
//   joy -> /joy -> joy2vehicle -> /vehicle_control -> serial_node
//   serial_node -> /encoder_pulse, /heartbeat
//   imu -> /imu, lidar -> /scan, camera -> /camera_stub
//   data_acquisition <- recorded topics (when recording)

#include <atomic>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "mir/bridge.hpp"
#include "mir/bus.hpp"
#include "mir/byte_pipe.hpp"
#include "mir/config.hpp"
#include "mir/daq.hpp"
#include "mir/firmware.hpp"
#include "mir/plant.hpp"
#include "mir/teleop.hpp"
#include "mir/world.hpp"

namespace mir::cli {

// The "joy" node: publishes scripted and injected joystick states on /joy,
// repeating the latest state at a fixed rate until the source disconnects.
class JoySource {
 public:
  static constexpr std::string_view kNodeName = "joy";

  JoySource(bus::Bus& bus, std::vector<teleop::JoyEvent> script, double autorepeat_hz = 20.0);
  ~JoySource();
  JoySource(const JoySource&) = delete;
  JoySource& operator=(const JoySource&) = delete;

  // Thread-safe; picked up on the next spin_once.
  void inject(const msgs::JoyState& joy);
  void spin_once(Timestamp now);
  void shutdown();

 private:
  void emit(msgs::JoyState joy, Timestamp now);

  bus::Bus& bus_;
  bus::NodeHandle node_;
  bus::Publisher pub_;
  std::vector<teleop::JoyEvent> script_;
  std::size_t next_event_ = 0;
  double repeat_period_;
  std::optional<msgs::JoyState> latest_;
  double last_emit_ = 0.0;
  bool alive_ = true;

  std::mutex mu_;
  std::vector<msgs::JoyState> injected_;
};

// Host end of the serial link ("serial_node"): forwards /vehicle_control to
// the control unit and republishes what the control unit sends back.
class SerialNode {
 public:
  static constexpr std::string_view kNodeName = "serial_node";

  SerialNode(bus::Bus& bus, std::uint16_t queue_depth);
  ~SerialNode();
  SerialNode(const SerialNode&) = delete;
  SerialNode& operator=(const SerialNode&) = delete;

  void forward_commands(wire::BytePipe& to_mcu, Timestamp now);
  void receive(wire::BytePipe& from_mcu, Timestamp now);
  void shutdown();

  const wire::DecoderCounters& link_counters() const { return rx_.counters(); }
  std::uint64_t decode_errors() const { return decode_errors_; }

 private:
  bus::Bus& bus_;
  bus::NodeHandle node_;
  bus::Subscription control_sub_;
  bus::Publisher pulse_pub_;
  bus::Publisher heartbeat_pub_;
  wire::StreamDecoder rx_;
  std::uint64_t decode_errors_ = 0;
  bool alive_ = true;
};

struct BringupOptions {
  bool headless = true;  // no bridge
  bool record = false;   // start data_acquisition even without a daq section
};

class SimSession {
 public:
  // Throws ConfigError / IoError when a component cannot start.
  SimSession(BringupConfig cfg, BringupOptions opts = {});
  ~SimSession();
  SimSession(const SimSession&) = delete;
  SimSession& operator=(const SimSession&) = delete;

  // Advances the whole system by one control tick (1 ms).
  void step();
  void run_for(double seconds);
  // Runs until cfg.duration is reached (when non-zero) or `stop` becomes true.
  // Paces against the wall clock when cfg.realtime is set.
  void run(const std::atomic<bool>& stop);

  // Flushes the recorder and removes every node from the bus. Idempotent.
  void shutdown();

  // Stops the teleop node, so /vehicle_control goes silent.
  void stop_teleop();

  Timestamp now() const { return Timestamp{static_cast<double>(ticks_) * dt_}; }
  double tick_period() const { return dt_; }
  const BringupConfig& config() const { return cfg_; }
  bus::Bus& bus() { return bus_; }
  const plant::Plant& plant() const { return plant_; }
  const firmware::ControlUnit& control_unit() const { return mcu_; }
  const firmware::PwmPair& last_pwm() const { return last_pwm_; }
  const plant::WorldModel& world() const { return world_; }
  JoySource& joy() { return *joy_; }
  SerialNode& serial_node() { return *serial_; }
  teleop::Joy2Vehicle* teleop() { return teleop_.get(); }
  daq::Recorder* recorder() { return recorder_.get(); }
  Bridge* bridge() { return bridge_.get(); }
  const std::optional<daq::Manifest>& final_manifest() const { return manifest_; }

 private:
  BringupConfig cfg_;
  double dt_;
  std::uint64_t ticks_ = 0;
  std::atomic<double> clock_{0.0};

  bus::Bus bus_;
  plant::WorldModel world_;
  plant::Plant plant_;
  firmware::ControlUnit mcu_;
  firmware::PwmPair last_pwm_;
  wire::BytePipe host_to_mcu_;
  wire::BytePipe mcu_to_host_;

  std::unique_ptr<JoySource> joy_;
  std::unique_ptr<teleop::Joy2Vehicle> teleop_;
  std::unique_ptr<SerialNode> serial_;

  std::optional<bus::NodeHandle> imu_node_, lidar_node_, camera_node_;
  std::optional<bus::Publisher> imu_pub_, scan_pub_, camera_pub_;
  std::uint64_t imu_every_, lidar_every_, camera_every_;
  std::uint32_t camera_frames_ = 0;

  std::unique_ptr<daq::Recorder> recorder_;
  std::unique_ptr<Bridge> bridge_;
  std::optional<daq::Manifest> manifest_;
  bool shut_down_ = false;
};

}  // namespace mir::cli
