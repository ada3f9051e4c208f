#pragma once

// Simulated ride-on car: motor dynamics, kinematic bicycle model and encoder
// phase generation.

#include <vector>

#include "mir/firmware.hpp"
#include "mir/msgs.hpp"

namespace mir::plant {

struct LidarConfig {
  double rate_hz = 5.0;
  double range_max = 5.0;

  static LidarConfig neato() { return {5.0, 5.0}; }
  static LidarConfig ydlidar() { return {8.0, 10.0}; }
};

struct PlantConfig {
  double wheel_radius = 0.1;       // m
  double v_max = 1.12;             // m/s at full duty
  double wheelbase = 0.8;          // m
  double steer_limit = 0.5;        // rad, symmetric
  double drive_gear_ratio = 5.0;   // encoder-shaft revs per wheel rev
  double steer_gear_ratio = 3.0;   // encoder-shaft revs per steering-column rev
  int encoder_ppr = 600;
  double drive_time_constant = 0.3;  // s
  double steer_rate_gain = 2.0;      // rad/s per unit duty
  double v_bat_drive = 9.6;          // V
  double v_bat_steer = 9.0;          // V
  LidarConfig lidar;
  double imu_rate_hz = 50.0;
  double camera_rate_hz = 20.0;

  // Throws ConfigError naming the first offending field.
  void validate() const;

  // Quadrature counts per encoder shaft revolution.
  double counts_per_rev() const { return 4.0 * encoder_ppr; }
};

struct VehicleState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;       // rad, counterclockwise from +x
  double speed = 0.0;         // m/s
  double steer_angle = 0.0;   // rad, positive = left
  double drive_shaft_angle = 0.0;
  double steer_shaft_angle = 0.0;
  Timestamp stamp;

  bool operator==(const VehicleState&) const = default;
};

// Output voltage of the H-bridge, linear in duty. Throws InvalidArgument for |duty| > 1.
double pwm_to_voltage(double duty, double v_bat);

// First-order lag toward duty * v_max with time constant drive_time_constant.
double step_drive(double speed, double duty, double dt, const PlantConfig& cfg);

// Rate-controlled steering with a hard clamp at +-steer_limit.
double step_steering(double steer_angle, double duty, double dt, const PlantConfig& cfg);

// Kinematic bicycle model, explicit Euler. Leaves speed and steer_angle as given.
VehicleState step_kinematics(const VehicleState& s, double dt, const PlantConfig& cfg);

// Exact sequence of phase states crossed by an encoder shaft moving from
// `from` to `to` radians, 4 * ppr edges per revolution.
std::vector<firmware::PhasePair> encoder_edges(double from, double to, int ppr);

// Phase state of an encoder shaft resting at `angle`.
firmware::PhasePair encoder_phase(double angle, int ppr);

class Plant {
 public:
  explicit Plant(PlantConfig cfg, VehicleState initial = {});

  // Applies the H-bridge duties for dt seconds.
  void step(const firmware::PwmPair& pwm, double dt);

  const VehicleState& state() const { return state_; }
  const VehicleState& previous() const { return prev_; }
  const PlantConfig& config() const { return cfg_; }

  // Encoder phase states produced by the last step().
  const std::vector<firmware::PhasePair>& drive_edges() const { return drive_edges_; }
  const std::vector<firmware::PhasePair>& steer_edges() const { return steer_edges_; }

 private:
  PlantConfig cfg_;
  VehicleState state_;
  VehicleState prev_;
  std::vector<firmware::PhasePair> drive_edges_;
  std::vector<firmware::PhasePair> steer_edges_;
};

}  // namespace mir::plant
