#include "mir/rotation.hpp"

#include <cmath>
#include <numbers>

#include "mir/error.hpp"

namespace mir::msgs {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_pi(double a) {
  a = std::remainder(a, 2.0 * kPi);
  return a <= -kPi ? a + 2.0 * kPi : a;
}

}  // namespace

Quaternion euler_to_quaternion(const EulerAngles& e) {
  if (!std::isfinite(e.roll) || !std::isfinite(e.pitch) || !std::isfinite(e.yaw)) {
    throw InvalidArgument("euler_to_quaternion: non-finite angle");
  }
  const double cr = std::cos(e.roll * 0.5), sr = std::sin(e.roll * 0.5);
  const double cp = std::cos(e.pitch * 0.5), sp = std::sin(e.pitch * 0.5);
  const double cy = std::cos(e.yaw * 0.5), sy = std::sin(e.yaw * 0.5);
  Quaternion q{
      cr * cp * cy + sr * sp * sy,
      sr * cp * cy - cr * sp * sy,
      cr * sp * cy + sr * cp * sy,
      cr * cp * sy - sr * sp * cy,
  };
  // The product of three unit half-angle rotations is unit up to rounding;
  // renormalizing keeps the 1e-9 guarantee for huge angles as well.
  const double n = norm(q);
  return {q.w / n, q.x / n, q.y / n, q.z / n};
}

EulerAngles quaternion_to_euler(const Quaternion& q_in) {
  const double n = norm(q_in);
  if (!std::isfinite(n) || std::abs(n - 1.0) >= 1e-6) {
    throw InvalidArgument("quaternion_to_euler: quaternion is not unit norm");
  }
  const Quaternion q{q_in.w / n, q_in.x / n, q_in.y / n, q_in.z / n};

  const double r00 = 1.0 - 2.0 * (q.y * q.y + q.z * q.z);
  const double r10 = 2.0 * (q.x * q.y + q.w * q.z);
  const double r20 = 2.0 * (q.x * q.z - q.w * q.y);
  const double r21 = 2.0 * (q.y * q.z + q.w * q.x);
  const double r22 = 1.0 - 2.0 * (q.x * q.x + q.y * q.y);

  const double cos_pitch = std::hypot(r00, r10);
  if (cos_pitch < 1e-9) {
    // Gimbal lock: only yaw -/+ roll is observable. At both +pi/2 and -pi/2
    // that combined angle is 2*atan2(z, w).
    return {0.0, std::copysign(kPi / 2.0, -r20), wrap_pi(2.0 * std::atan2(q.z, q.w))};
  }
  return {std::atan2(r21, r22), std::atan2(-r20, cos_pitch), std::atan2(r10, r00)};
}

double norm(const Quaternion& q) {
  return std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
}

double norm(const Vector3& v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

Quaternion conjugate(const Quaternion& q) { return {q.w, -q.x, -q.y, -q.z}; }

Quaternion operator*(const Quaternion& a, const Quaternion& b) {
  return {
      a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
      a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
      a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
      a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
  };
}

Vector3 rotate(const Quaternion& q, const Vector3& v) {
  const Quaternion r = q * Quaternion{0.0, v.x, v.y, v.z} * conjugate(q);
  return {r.x, r.y, r.z};
}

ImuSample imu_to_rep103(const ImuSample& s) {
  if (s.frame != ImuFrame::kRazor) {
    throw InvalidState("imu_to_rep103: sample is already in the REP-103 frame");
  }
  ImuSample out = s;
  out.accel = remap_razor_to_rep103(s.accel);
  out.gyro = remap_razor_to_rep103(s.gyro);
  out.mag = remap_razor_to_rep103(s.mag);
  // Conjugation by the half turn about x: R' = C R C with C = diag(1, -1, -1).
  const Quaternion& q = s.orientation;
  out.orientation = {q.w, q.x, -q.y, -q.z};
  out.frame = ImuFrame::kRep103;
  return out;
}

}  // namespace mir::msgs
