#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "mir/error.hpp"
#include "mir/rotation.hpp"
#include "mir/sensors.hpp"
#include "support/oracles.hpp"

namespace {

using namespace mir::plant;

constexpr double kPi = std::numbers::pi;

WorldModel wall_ahead(double d) { return WorldModel({{d, -1000.0, d, 1000.0}}); }

TEST(ScanLidar, EmptyWorld) {
  const auto scan = scan_lidar(WorldModel{}, {}, LidarConfig::neato());
  ASSERT_EQ(scan.ranges.size(), 360u);
  for (std::size_t i = 0; i < 360; ++i) {
    EXPECT_FALSE(scan.valid[i]);
    EXPECT_EQ(scan.ranges[i], 0.0);
  }
}

TEST(ScanLidar, WallTwoMetresAhead) {
  const auto scan = scan_lidar(wall_ahead(2.0), {}, LidarConfig::neato());
  ASSERT_TRUE(scan.valid[0]);
  EXPECT_NEAR(scan.ranges[0], 2.0, 1e-9);
  ASSERT_TRUE(scan.valid[60]);
  EXPECT_NEAR(scan.ranges[60], 4.0, 1e-6);
  EXPECT_NEAR(scan.ranges[300], 4.0, 1e-6);
  // cos(66.42 deg) = 0.4, the last beam within 5 m is 66.
  EXPECT_TRUE(scan.valid[66]);
  EXPECT_FALSE(scan.valid[67]);
  EXPECT_FALSE(scan.valid[90]);
  EXPECT_FALSE(scan.valid[180]);
  EXPECT_EQ(scan.range_max, 5.0);
}

TEST(ScanLidar, FollowsHeading) {
  const auto scan = scan_lidar(wall_ahead(2.0), {0.0, 0.0, kPi / 2}, LidarConfig::neato());
  // Wall now on the right: beam 270 (pointing -90 deg relative) hits it.
  EXPECT_NEAR(scan.ranges[270], 2.0, 1e-9);
  EXPECT_FALSE(scan.valid[0]);
}

TEST(ScanLidar, RangeCutoff) {
  EXPECT_FALSE(scan_lidar(wall_ahead(6.0), {}, LidarConfig::neato()).valid[0]);
  const auto far = scan_lidar(wall_ahead(6.0), {}, LidarConfig::ydlidar());
  EXPECT_TRUE(far.valid[0]);
  EXPECT_NEAR(far.ranges[0], 6.0, 1e-9);
  EXPECT_TRUE(scan_lidar(wall_ahead(5.0), {}, LidarConfig::neato()).valid[0]);
}

TEST(ScanLidar, AgreesWithDenseMarch) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> c(-6, 6);
  for (int w = 0; w < 30; ++w) {
    std::vector<Segment> segs;
    std::vector<mir::oracle::Seg> ref;
    const int n = 1 + static_cast<int>(rng() % 20);
    for (int i = 0; i < n; ++i) {
      const Segment s{c(rng), c(rng), c(rng), c(rng)};
      segs.push_back(s);
      ref.push_back({s.x1, s.y1, s.x2, s.y2});
    }
    const Pose2D pose{c(rng) / 3, c(rng) / 3, c(rng)};
    const auto scan = scan_lidar(WorldModel(segs), pose, LidarConfig::neato());
    for (std::size_t i = 0; i < 360; ++i) {
      const double r = mir::oracle::march_ray(ref, pose.x, pose.y, pose.heading + i * scan.angle_increment, 5.0);
      if (r < 0) {
        ASSERT_FALSE(scan.valid[i]) << "world " << w << " beam " << i;
      } else {
        ASSERT_TRUE(scan.valid[i]) << "world " << w << " beam " << i;
        ASSERT_NEAR(scan.ranges[i], r, 1e-3) << "world " << w << " beam " << i;
      }
    }
  }
}

TEST(SampleImu, AtRest) {
  VehicleState s;
  s.heading = 0.7;
  const auto imu = sample_imu(s, s, 0.02);
  EXPECT_EQ(imu.frame, mir::msgs::ImuFrame::kRazor);
  EXPECT_EQ(imu.accel, (mir::msgs::Vector3{0, 0, 9.81}));
  EXPECT_EQ(imu.gyro, (mir::msgs::Vector3{0, 0, 0}));
  EXPECT_NEAR(mir::msgs::norm(imu.mag), 1.0, 1e-12);
}

TEST(SampleImu, LeftTurnIsNegativeZInRazor) {
  VehicleState a, b;
  a.heading = 1.0;
  b.heading = 1.0 + 0.5 * 0.02;
  const auto imu = sample_imu(a, b, 0.02);
  EXPECT_NEAR(imu.gyro.z, -0.5, 1e-12);
  EXPECT_NEAR(mir::msgs::imu_to_rep103(imu).gyro.z, 0.5, 1e-12);
}

TEST(SampleImu, HeadingWrapDoesNotSpike) {
  VehicleState a, b;
  a.heading = kPi - 0.001;
  b.heading = -kPi + 0.001;
  EXPECT_NEAR(sample_imu(a, b, 0.01).gyro.z, -0.2, 1e-9);
}

TEST(SampleImu, LongitudinalAcceleration) {
  VehicleState a, b;
  a.speed = 0.5;
  b.speed = 0.6;
  EXPECT_NEAR(sample_imu(a, b, 0.1).accel.x, 1.0, 1e-12);
}

// The magnetometer sees world north expressed in the body frame.
TEST(SampleImu, MagnetometerAndOrientationAgree) {
  std::mt19937_64 rng(72);
  std::uniform_real_distribution<double> h(-kPi, kPi);
  for (int i = 0; i < 1000; ++i) {
    VehicleState s;
    s.heading = h(rng);
    const auto imu = sample_imu(s, s, 0.02);
    const auto rep = mir::msgs::imu_to_rep103(imu);
    // REP-103 body axes: north appears at angle -heading.
    EXPECT_NEAR(rep.mag.x, std::cos(-s.heading), 1e-12);
    EXPECT_NEAR(rep.mag.y, std::sin(-s.heading), 1e-12);
    const auto e = mir::msgs::quaternion_to_euler(rep.orientation);
    EXPECT_NEAR(std::remainder(e.yaw - s.heading, 2 * kPi), 0.0, 1e-9);
  }
}

TEST(World, ParseFormat) {
  const auto w = parse_world("# room\n0 0 1 0\n\n  1 0 1 1   # east wall\n");
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(w.segment(1).y2, 1.0);
}

TEST(World, ErrorsCarryLineNumbers) {
  try {
    parse_world("0 0 1 0\n0 0 1\n");
    FAIL();
  } catch (const mir::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_world("0 0 1 0 9\n"), mir::ConfigError);
  EXPECT_THROW(parse_world("0 0 nan 0\n"), mir::ConfigError);
  EXPECT_THROW(load_world("/nonexistent/world.txt"), mir::ConfigError);
}

}  // namespace
