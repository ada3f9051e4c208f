#pragma once

// Message schemas exchanged between the simulated control unit, the host
// nodes and the recorder. All messages are plain value types.

#include <compare>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <variant>
#include <vector>

namespace mir {

struct Timestamp {
  double sec = 0.0;  // seconds since simulation epoch

  friend constexpr auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

inline constexpr Timestamp operator+(Timestamp t, double dt) { return {t.sec + dt}; }
inline constexpr double operator-(Timestamp a, Timestamp b) { return a.sec - b.sec; }

}  // namespace mir

namespace mir::msgs {

enum class SchemaId : std::uint16_t {
  kVehicleControl = 1,
  kEncoderPulse = 2,
  kImu = 3,
  kLaserScan = 4,
  kHeartbeat = 5,
  kJoy = 6,
  kCameraStub = 7,
};

std::string_view schema_name(SchemaId id);

struct JoyState {
  std::vector<double> axes;            // [0] steering, [1] throttle; each in [-1, 1]
  std::vector<std::uint8_t> buttons;   // 0 or 1
  Timestamp stamp;

  bool operator==(const JoyState&) const = default;
};

// Normalized drive-by-wire command. +steering is full left, +throttle full forward.
struct VehicleControl {
  double steering = 0.0;
  double throttle = 0.0;
  Timestamp stamp;
  std::uint32_t seq = 0;

  bool operator==(const VehicleControl&) const = default;
};

// Cumulative 4x quadrature counts of the drive and steering encoder shafts.
struct EncoderPulse {
  std::int64_t drive_count = 0;
  std::int64_t steer_count = 0;
  Timestamp stamp;
  std::uint32_t seq = 0;

  bool operator==(const EncoderPulse&) const = default;
};

struct EulerAngles {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  bool operator==(const EulerAngles&) const = default;
};

struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Quaternion&) const = default;
};

struct Vector3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Vector3&) const = default;
};

enum class ImuFrame : std::uint8_t {
  kRazor = 0,   // x forward, y right, z down
  kRep103 = 1,  // x forward, y left, z up
};

struct ImuSample {
  Vector3 accel;  // m/s^2
  Vector3 gyro;   // rad/s
  Vector3 mag;    // normalized field
  Quaternion orientation;
  ImuFrame frame = ImuFrame::kRazor;
  Timestamp stamp;

  bool operator==(const ImuSample&) const = default;
};

inline constexpr std::size_t kScanBeams = 360;

// Invalid beams carry range 0.0 and valid == false.
struct LaserScan {
  double angle_min = 0.0;
  double angle_increment = 2.0 * std::numbers::pi / kScanBeams;
  std::vector<double> ranges = std::vector<double>(kScanBeams, 0.0);
  double range_max = 5.0;
  std::vector<std::uint8_t> valid = std::vector<std::uint8_t>(kScanBeams, 0);
  Timestamp stamp;

  bool operator==(const LaserScan&) const = default;
};

// Control unit health counters, published once per second.
struct Heartbeat {
  std::uint64_t frames_ok = 0;
  std::uint64_t frames_bad_checksum = 0;
  std::uint64_t invalid_transitions = 0;
  std::uint64_t clamp_count = 0;
  std::uint64_t stale_count = 0;
  std::uint64_t malformed_count = 0;
  Timestamp stamp;

  bool operator==(const Heartbeat&) const = default;
};

// Placeholder for a camera image: only the stamp and frame counter survive.
struct CameraStub {
  std::uint32_t frame_counter = 0;
  Timestamp stamp;

  bool operator==(const CameraStub&) const = default;
};

using Message = std::variant<VehicleControl, EncoderPulse, ImuSample, LaserScan,
                             Heartbeat, JoyState, CameraStub>;

SchemaId schema_of(const Message& msg);
Timestamp stamp_of(const Message& msg);

}  // namespace mir::msgs
