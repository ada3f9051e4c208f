#pragma once

#include "mir/msgs.hpp"
#include "mir/plant.hpp"
#include "mir/world.hpp"

namespace mir::plant {

struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

// 360 beams at 1 degree spacing, counterclockwise from the heading. Beams
// with no return within range_max are marked invalid with range 0.
msgs::LaserScan scan_lidar(const WorldModel& world, const Pose2D& pose, const LidarConfig& cfg,
                           Timestamp stamp = {});

inline constexpr double kGravity = 9.81;

// Razor-frame IMU reading from two consecutive plant states dt apart.
// Accelerometer reports the gravity vector (+z, down) plus the longitudinal
// acceleration; gyro z is the negated (counterclockwise) yaw rate.
msgs::ImuSample sample_imu(const VehicleState& prev, const VehicleState& curr, double dt);

}  // namespace mir::plant
