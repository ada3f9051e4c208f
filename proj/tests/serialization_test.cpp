#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "mir/error.hpp"
#include "mir/serialization.hpp"

namespace {

using namespace mir::msgs;
using mir::wire::Bytes;
using mir::wire::deserialize;
using mir::wire::deserialize_as;
using mir::wire::serialize;

template <class T>
T round_trip(const T& msg) {
  const Bytes b = serialize(msg);
  return deserialize_as<T>(b, schema_of(msg), "/test");
}

TEST(Serialization, VehicleControlZero) {
  const VehicleControl zero{};
  const Bytes b = serialize(zero);
  EXPECT_EQ(b.size(), 8u + 8u + 8u + 4u);
  EXPECT_EQ(round_trip(zero), zero);
}

TEST(Serialization, EncoderPulseBoundaryValues) {
  EncoderPulse p;
  p.drive_count = -1;
  p.steer_count = std::int64_t{1} << 40;
  p.stamp = {12.5};
  p.seq = 0xFFFFFFFFu;
  const Bytes b = serialize(p);
  ASSERT_EQ(b.size(), 8u + 8u + 8u + 4u);
  // -1 as i64 LE is eight 0xFF bytes; 2^40 has a single 0x01 at byte 5.
  for (int i = 0; i < 8; ++i) EXPECT_EQ(b[i], 0xFF);
  const Bytes steer(b.begin() + 8, b.begin() + 16);
  EXPECT_EQ(steer, (Bytes{0, 0, 0, 0, 0, 1, 0, 0}));
  EXPECT_EQ(round_trip(p), p);

  p.drive_count = std::numeric_limits<std::int64_t>::min();
  p.steer_count = std::numeric_limits<std::int64_t>::max();
  EXPECT_EQ(round_trip(p), p);
}

TEST(Serialization, LittleEndianFloat) {
  VehicleControl c;
  c.steering = 1.0;  // 0x3FF0000000000000
  const Bytes b = serialize(c);
  EXPECT_EQ(Bytes(b.begin(), b.begin() + 8), (Bytes{0, 0, 0, 0, 0, 0, 0xF0, 0x3F}));
}

TEST(Serialization, AllSchemasRoundTrip) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int i = 0; i < 2000; ++i) {
    ImuSample imu;
    imu.accel = {u(rng), u(rng), u(rng)};
    imu.gyro = {u(rng), u(rng), u(rng)};
    imu.mag = {u(rng), u(rng), u(rng)};
    imu.orientation = {u(rng), u(rng), u(rng), u(rng)};
    imu.frame = i % 2 ? ImuFrame::kRep103 : ImuFrame::kRazor;
    imu.stamp = {u(rng)};
    ASSERT_EQ(round_trip(imu), imu);

    LaserScan scan;
    for (std::size_t k = 0; k < kScanBeams; ++k) {
      scan.valid[k] = rng() % 2;
      scan.ranges[k] = scan.valid[k] ? std::abs(u(rng)) : 0.0;
    }
    scan.stamp = {u(rng)};
    ASSERT_EQ(round_trip(scan), scan);

    Heartbeat hb{rng(), rng(), rng(), rng(), rng(), rng(), {u(rng)}};
    ASSERT_EQ(round_trip(hb), hb);

    JoyState joy;
    joy.axes.resize(rng() % 8);
    for (auto& a : joy.axes) a = u(rng) / 100;
    joy.buttons.resize(rng() % 12);
    for (auto& btn : joy.buttons) btn = rng() % 2;
    ASSERT_EQ(round_trip(joy), joy);

    CameraStub cam{static_cast<std::uint32_t>(rng()), {u(rng)}};
    ASSERT_EQ(round_trip(cam), cam);
  }
}

TEST(Serialization, PreservesNegativeZeroAndNan) {
  VehicleControl c;
  c.steering = -0.0;
  c.throttle = std::numeric_limits<double>::quiet_NaN();
  const Bytes b = serialize(c);
  const auto back = deserialize_as<VehicleControl>(b, SchemaId::kVehicleControl, "/x");
  EXPECT_TRUE(std::signbit(back.steering));
  EXPECT_TRUE(std::isnan(back.throttle));
  EXPECT_EQ(serialize(back), b);
}

TEST(Serialization, TruncatedPayloadIsDecodeError) {
  EncoderPulse p;
  p.drive_count = 5;
  Bytes b = serialize(p);
  for (std::size_t n = 0; n < b.size(); ++n) {
    const Bytes cut(b.begin(), b.begin() + n);
    EXPECT_THROW(deserialize(cut, SchemaId::kEncoderPulse, "/encoder_pulse"), mir::DecodeError) << n;
  }
  b.push_back(0);
  EXPECT_THROW(deserialize(b, SchemaId::kEncoderPulse, "/encoder_pulse"), mir::DecodeError);
}

TEST(Serialization, DecodeErrorNamesTopic) {
  try {
    deserialize(Bytes{1, 2, 3}, SchemaId::kVehicleControl, "/vehicle_control");
    FAIL() << "expected DecodeError";
  } catch (const mir::DecodeError& e) {
    EXPECT_NE(std::string(e.what()).find("/vehicle_control"), std::string::npos);
  }
}

TEST(Serialization, RejectsScanWithWrongBeamCount) {
  LaserScan scan;
  scan.ranges.pop_back();
  scan.valid.pop_back();
  const Bytes b = serialize(scan);
  EXPECT_THROW(deserialize(b, SchemaId::kLaserScan, "/scan"), mir::DecodeError);
}

TEST(Serialization, RejectsUnknownImuFrameTag) {
  Bytes b = serialize(ImuSample{});
  b[b.size() - 9] = 7;  // frame tag sits just before the f64 stamp
  EXPECT_THROW(deserialize(b, SchemaId::kImu, "/imu"), mir::DecodeError);
}

TEST(Serialization, ListCountPrefixIsU16) {
  JoyState joy;
  joy.axes = {0.5, -0.5};
  joy.buttons = {1};
  const Bytes b = serialize(joy);
  ASSERT_EQ(b.size(), 2u + 16u + 2u + 1u + 8u);
  EXPECT_EQ(b[0], 2);
  EXPECT_EQ(b[1], 0);
  EXPECT_EQ(b[18], 1);
  EXPECT_EQ(b[19], 0);
}

}  // namespace
