#include "mir/sensors.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "mir/error.hpp"
#include "mir/rotation.hpp"

namespace mir::plant {

msgs::LaserScan scan_lidar(const WorldModel& world, const Pose2D& pose, const LidarConfig& cfg,
                           Timestamp stamp) {
  constexpr std::size_t kBeams = msgs::kScanBeams;
  msgs::LaserScan scan;
  scan.range_max = cfg.range_max;
  scan.stamp = stamp;
  if (world.empty()) return scan;

  std::array<double, kBeams> dx{}, dy{}, t{};
  for (std::size_t i = 0; i < kBeams; ++i) {
    const double a = pose.heading + static_cast<double>(i) * scan.angle_increment;
    dx[i] = std::cos(a);
    dy[i] = std::sin(a);
  }
  simd::raycast_nearest(world.view(), pose.x, pose.y, dx, dy, t);
  for (std::size_t i = 0; i < kBeams; ++i) {
    if (t[i] <= cfg.range_max) {
      scan.ranges[i] = t[i];
      scan.valid[i] = 1;
    }
  }
  return scan;
}

msgs::ImuSample sample_imu(const VehicleState& prev, const VehicleState& curr, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("sample_imu: dt must be positive");
  const double yaw_rate = std::remainder(curr.heading - prev.heading, 2.0 * std::numbers::pi) / dt;
  const double accel_x = (curr.speed - prev.speed) / dt;

  msgs::ImuSample s;
  s.frame = msgs::ImuFrame::kRazor;
  s.stamp = curr.stamp;
  s.accel = {accel_x, 0.0, kGravity};
  s.gyro = {0.0, 0.0, -yaw_rate};
  // Magnetic north along world +x; Razor yaw grows clockwise.
  s.mag = {std::cos(curr.heading), std::sin(curr.heading), 0.0};
  s.orientation = msgs::euler_to_quaternion({0.0, 0.0, -curr.heading});
  return s;
}

}  // namespace mir::plant
