#pragma once

// Attitude math (intrinsic Z-Y-X, i.e. yaw then pitch then roll) and the
// Razor <-> REP-103 IMU frame conversion.

#include "mir/msgs.hpp"

namespace mir::msgs {

// Throws InvalidArgument on non-finite angles.
Quaternion euler_to_quaternion(const EulerAngles& e);

// Requires |norm(q) - 1| < 1e-6. At gimbal lock (pitch = +-pi/2) roll is
// reported as 0 and the remaining rotation is folded into yaw.
EulerAngles quaternion_to_euler(const Quaternion& q);

double norm(const Quaternion& q);
double norm(const Vector3& v);
Quaternion conjugate(const Quaternion& q);
Quaternion operator*(const Quaternion& a, const Quaternion& b);
Vector3 rotate(const Quaternion& q, const Vector3& v);

// (x, y, z) -> (x, -y, -z). An involution; it is its own inverse.
constexpr Vector3 remap_razor_to_rep103(const Vector3& v) { return {v.x, -v.y, -v.z}; }

// Converts a Razor-frame sample into REP-103. Throws InvalidState when the
// sample is already REP-103.
ImuSample imu_to_rep103(const ImuSample& s);

}  // namespace mir::msgs
