#include "mir/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mir/error.hpp"

namespace mir::plant {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Index of the last encoder edge at or below `angle`. Angles that land within
// 1e-9 counts of an edge are snapped onto it so that an exact multiple of the
// edge pitch is never lost to rounding.
std::int64_t edge_index(double angle, int ppr) {
  const double pos = angle / kTwoPi * (4.0 * ppr);
  const double nearest = std::round(pos);
  if (std::abs(pos - nearest) < 1e-9) return static_cast<std::int64_t>(nearest);
  return static_cast<std::int64_t>(std::floor(pos));
}

constexpr firmware::PhasePair kForward[4] = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};

firmware::PhasePair phase_at(std::int64_t index) {
  return kForward[((index % 4) + 4) % 4];
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(std::string("plant.") + name + " must be positive and finite");
  }
}

}  // namespace

void PlantConfig::validate() const {
  require_positive(wheel_radius, "wheel_radius");
  require_positive(v_max, "v_max");
  require_positive(wheelbase, "wheelbase");
  require_positive(steer_limit, "steer_limit");
  if (steer_limit >= std::numbers::pi / 2.0) {
    throw ConfigError("plant.steer_limit must be below pi/2");
  }
  require_positive(drive_gear_ratio, "drive_gear_ratio");
  require_positive(steer_gear_ratio, "steer_gear_ratio");
  if (encoder_ppr <= 0) throw ConfigError("plant.encoder_ppr must be positive");
  require_positive(drive_time_constant, "drive_time_constant");
  require_positive(steer_rate_gain, "steer_rate_gain");
  require_positive(v_bat_drive, "v_bat_drive");
  require_positive(v_bat_steer, "v_bat_steer");
  require_positive(lidar.rate_hz, "lidar.rate_hz");
  require_positive(lidar.range_max, "lidar.range_max");
  require_positive(imu_rate_hz, "imu_rate_hz");
  require_positive(camera_rate_hz, "camera_rate_hz");
}

double pwm_to_voltage(double duty, double v_bat) {
  if (!(std::abs(duty) <= 1.0)) throw InvalidArgument("pwm_to_voltage: |duty| must not exceed 1");
  return duty * v_bat;
}

double step_drive(double speed, double duty, double dt, const PlantConfig& cfg) {
  if (!(dt > 0.0)) throw InvalidArgument("step_drive: dt must be positive");
  const double target = std::clamp(duty, -1.0, 1.0) * cfg.v_max;
  const double next = speed + (target - speed) * -std::expm1(-dt / cfg.drive_time_constant);
  return std::clamp(next, -cfg.v_max, cfg.v_max);
}

double step_steering(double steer_angle, double duty, double dt, const PlantConfig& cfg) {
  if (!(dt > 0.0)) throw InvalidArgument("step_steering: dt must be positive");
  const double next = steer_angle + cfg.steer_rate_gain * std::clamp(duty, -1.0, 1.0) * dt;
  return std::clamp(next, -cfg.steer_limit, cfg.steer_limit);
}

VehicleState step_kinematics(const VehicleState& s, double dt, const PlantConfig& cfg) {
  if (!(dt > 0.0)) throw InvalidArgument("step_kinematics: dt must be positive");
  VehicleState n = s;
  n.x += s.speed * std::cos(s.heading) * dt;
  n.y += s.speed * std::sin(s.heading) * dt;
  n.heading += s.speed / cfg.wheelbase * std::tan(s.steer_angle) * dt;
  n.drive_shaft_angle += s.speed / cfg.wheel_radius * cfg.drive_gear_ratio * dt;
  n.steer_shaft_angle = s.steer_angle * cfg.steer_gear_ratio;
  n.stamp = s.stamp + dt;
  return n;
}

std::vector<firmware::PhasePair> encoder_edges(double from, double to, int ppr) {
  std::vector<firmware::PhasePair> out;
  const std::int64_t i0 = edge_index(from, ppr);
  const std::int64_t i1 = edge_index(to, ppr);
  if (i1 > i0) {
    out.reserve(static_cast<std::size_t>(i1 - i0));
    for (std::int64_t k = i0 + 1; k <= i1; ++k) out.push_back(phase_at(k));
  } else if (i1 < i0) {
    out.reserve(static_cast<std::size_t>(i0 - i1));
    for (std::int64_t k = i0 - 1; k >= i1; --k) out.push_back(phase_at(k));
  }
  return out;
}

firmware::PhasePair encoder_phase(double angle, int ppr) { return phase_at(edge_index(angle, ppr)); }

Plant::Plant(PlantConfig cfg, VehicleState initial) : cfg_(cfg), state_(initial), prev_(initial) {
  cfg_.validate();
}

void Plant::step(const firmware::PwmPair& pwm, double dt) {
  prev_ = state_;
  VehicleState s = state_;
  s.steer_angle = step_steering(s.steer_angle, pwm.steer.duty, dt, cfg_);
  s.speed = step_drive(s.speed, pwm.drive.duty, dt, cfg_);
  state_ = step_kinematics(s, dt, cfg_);
  drive_edges_ = encoder_edges(prev_.drive_shaft_angle, state_.drive_shaft_angle, cfg_.encoder_ppr);
  steer_edges_ = encoder_edges(prev_.steer_shaft_angle, state_.steer_shaft_angle, cfg_.encoder_ppr);
}

}  // namespace mir::plant
