#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "mir/bus.hpp"
#include "mir/daq.hpp"
#include "mir/error.hpp"
#include "mir/serialization.hpp"
#include "support/temp_dir.hpp"

namespace {

using namespace mir::daq;
using mir::Timestamp;
using mir::msgs::CameraStub;
using mir::msgs::EncoderPulse;
using mir::msgs::SchemaId;

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Base64, RoundTripAndKnownValues) {
  EXPECT_EQ(base64_encode(mir::wire::Bytes{}), "");
  EXPECT_EQ(base64_encode(mir::wire::Bytes{'f'}), "Zg==");
  EXPECT_EQ(base64_encode(mir::wire::Bytes{'f', 'o', 'o', 'b'}), "Zm9vYg==");
  for (std::size_t n = 0; n < 70; ++n) {
    mir::wire::Bytes b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<std::uint8_t>(i * 37 + 5);
    ASSERT_EQ(base64_decode(base64_encode(b)), b) << n;
  }
  EXPECT_THROW(base64_decode("Zg="), mir::DecodeError);
  EXPECT_THROW(base64_decode("Z!=="), mir::DecodeError);
}

TEST(Jsonl, LineFormat) {
  const LogRecord r{{1.5}, "/camera_stub", 3, SchemaId::kCameraStub, {1, 2, 3}};
  const std::string line = to_jsonl(r);
  EXPECT_EQ(line, R"({"t":1.5,"topic":"/camera_stub","seq":3,"schema":7,"data":"AQID"})");
  EXPECT_EQ(parse_jsonl(line), r);
  EXPECT_THROW(parse_jsonl("{\"t\":1"), mir::DecodeError);
  EXPECT_THROW(parse_jsonl(R"({"t":1.5,"topic":"/x","seq":3,"schema":99,"data":""})"), mir::DecodeError);
}

class RecorderTest : public ::testing::Test {
 protected:
  RecorderTest()
      : producer(bus.create_node("producer")),
        pulse_pub(bus.advertise(producer, {"/encoder_pulse", SchemaId::kEncoderPulse, false})),
        cam_pub(bus.advertise(producer, {"/camera_stub", SchemaId::kCameraStub, false})) {}

  RecordingConfig config(std::vector<std::string> topics, const std::string& name = "s") const {
    RecordingConfig c;
    c.topics = std::move(topics);
    c.output_dir = tmp.path();
    c.session_name = name;
    return c;
  }

  // 50 Hz pulses and 20 Hz camera frames for `seconds`, recorder spun at 1 kHz.
  void drive(Recorder& rec, double seconds) {
    const int ticks = static_cast<int>(std::lround(seconds * 1000));
    for (int i = 1; i <= ticks; ++i) {
      const Timestamp now{i * 0.001};
      if (i % 20 == 0) pulse_pub.publish(EncoderPulse{i, -i, now, static_cast<std::uint32_t>(i / 20)});
      if (i % 50 == 0) cam_pub.publish(CameraStub{static_cast<std::uint32_t>(i / 50), now});
      rec.spin_once(now);
    }
  }

  mir::testing::TempDir tmp;
  mir::bus::Bus bus;
  mir::bus::NodeHandle producer;
  mir::bus::Publisher pulse_pub;
  mir::bus::Publisher cam_pub;
};

TEST_F(RecorderTest, CountsTwoSecondsOfPulses) {
  Recorder rec(bus, config({"/encoder_pulse"}));
  drive(rec, 2.0);
  const Manifest m = rec.stop({2.0});
  EXPECT_NEAR(static_cast<double>(m.counts.at("/encoder_pulse")), 100.0, 1.0);
  EXPECT_FALSE(m.truncated);
  EXPECT_DOUBLE_EQ(m.t_start, 0.02);
  EXPECT_DOUBLE_EQ(m.t_end, 2.0);

  const auto on_disk = Manifest::from_json(read_file(manifest_path(tmp / "s")));
  EXPECT_EQ(on_disk.counts, m.counts);
  EXPECT_FALSE(bus.graph().nodes.count("data_acquisition"));
}

TEST_F(RecorderTest, ConfigErrors) {
  EXPECT_THROW(Recorder(bus, config({})), mir::ConfigError);
  try {
    Recorder r(bus, config({"/encoder_pulse", "/lidar_typo"}));
    FAIL();
  } catch (const mir::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("/lidar_typo"), std::string::npos);
  }
  EXPECT_FALSE(bus.graph().nodes.count("data_acquisition"));
}

TEST_F(RecorderTest, UnwritablePathFailsImmediately) {
  std::ofstream(tmp / "file") << "x";
  auto c = config({"/encoder_pulse"});
  c.output_dir = tmp / "file";
  EXPECT_THROW(Recorder(bus, c), mir::IoError);
  EXPECT_FALSE(bus.graph().nodes.count("data_acquisition"));
}

TEST_F(RecorderTest, DiskFullMarksTruncated) {
  if (!std::filesystem::exists("/dev/full")) GTEST_SKIP() << "no /dev/full";
  std::filesystem::create_directories(tmp / "full");
  std::filesystem::create_symlink("/dev/full", log_path(tmp / "full"));
  Recorder rec(bus, config({"/encoder_pulse", "/camera_stub"}, "full"));
  EXPECT_NO_THROW(drive(rec, 5.0));
  EXPECT_FALSE(rec.recording());
  const Manifest m = rec.stop({5.0});
  EXPECT_TRUE(m.truncated);
  EXPECT_TRUE(Manifest::from_json(read_file(manifest_path(tmp / "full"))).truncated);
}

TEST_F(RecorderTest, BackwardsTimeIsRejected) {
  Recorder rec(bus, config({"/encoder_pulse"}));
  pulse_pub.publish(EncoderPulse{0, 0, {1.0}, 0});
  pulse_pub.publish(EncoderPulse{0, 0, {0.5}, 1});
  EXPECT_THROW(rec.spin_once({1.0}), mir::InvalidState);
}

TEST_F(RecorderTest, LogIsInPublishOrderAcrossTopics) {
  Recorder rec(bus, config({"/camera_stub", "/encoder_pulse"}));
  drive(rec, 1.0);
  rec.stop({1.0});
  const auto s = Session::open(tmp / "s");
  ASSERT_EQ(s.records().size(), 50u + 20u);
  for (std::size_t i = 1; i < s.records().size(); ++i) {
    ASSERT_LE(s.records()[i - 1].t, s.records()[i].t);
  }
  const auto pulses = s.topic_records("/encoder_pulse");
  ASSERT_EQ(pulses.size(), 50u);
  for (std::size_t i = 0; i < pulses.size(); ++i) {
    EXPECT_EQ(pulses[i]->seq, i);
    const auto p = mir::wire::deserialize_as<EncoderPulse>(pulses[i]->data, SchemaId::kEncoderPulse, "/encoder_pulse");
    EXPECT_EQ(p.drive_count, static_cast<std::int64_t>(20 * (i + 1)));
  }
}

TEST_F(RecorderTest, SessionCountsCorruptLines) {
  {
    Recorder rec(bus, config({"/encoder_pulse"}));
    drive(rec, 0.2);
  }  // destructor finalizes
  {
    std::ofstream out(log_path(tmp / "s"), std::ios::app);
    out << "{not json\n";
    out << R"({"t":9.0,"topic":"/encoder_pulse","seq":99,"schema":2,"data":"AAAA"})" << "\n";
  }
  const auto s = Session::open(tmp / "s");
  EXPECT_EQ(s.corrupt_lines(), 1u);
  EXPECT_EQ(s.records().size(), 11u);

  // The short payload parses as a line but fails to decode on replay.
  mir::bus::Bus replay_bus;
  auto sub = replay_bus.subscribe(replay_bus.create_node("sink"), "/encoder_pulse", 100);
  Replayer rp(replay_bus, s, 1.0, {0.0});
  rp.spin_once({100.0});
  EXPECT_TRUE(rp.done());
  EXPECT_EQ(rp.summary().published, 10u);
  EXPECT_EQ(rp.summary().skipped_corrupt, 2u);
  EXPECT_EQ(sub.drain().size(), 10u);
}

TEST(Session, MissingFilesAreIoErrors) {
  mir::testing::TempDir tmp;
  EXPECT_THROW(Session::open(tmp / "none"), mir::IoError);
}

class AlignTest : public ::testing::Test {
 protected:
  void SetUp() override {
    RecordingConfig c;
    c.topics = {"/encoder_pulse", "/camera_stub"};
    c.output_dir = tmp.path();
    c.session_name = "a";
    mir::bus::Bus bus;
    const auto n = bus.create_node("p");
    auto pulses = bus.advertise(n, {"/encoder_pulse", SchemaId::kEncoderPulse, false});
    auto cams = bus.advertise(n, {"/camera_stub", SchemaId::kCameraStub, false});
    Recorder rec(bus, c);
    for (double t : {1.0, 1.25, 1.5}) pulses.publish(EncoderPulse{0, 0, {t}, 0});
    cams.publish(CameraStub{1, {1.125}});
    rec.stop({2.0});
    session = std::make_unique<Session>(Session::open(tmp / "a"));
  }

  mir::testing::TempDir tmp;
  std::unique_ptr<Session> session;
};

TEST_F(AlignTest, ExactMatch) {
  const auto a = align(*session, {1.25}, 0.05);
  ASSERT_TRUE(a.at("/encoder_pulse"));
  EXPECT_EQ(a.at("/encoder_pulse")->t.sec, 1.25);
  EXPECT_FALSE(a.at("/camera_stub"));
}

TEST_F(AlignTest, TieGoesToEarlier) {
  // Stamps are dyadic so 1.375 is exactly halfway between 1.25 and 1.5.
  const auto a = align(*session, {1.375}, 0.2);
  ASSERT_TRUE(a.at("/encoder_pulse"));
  EXPECT_EQ(a.at("/encoder_pulse")->t.sec, 1.25);
}

TEST_F(AlignTest, GapBeyondTolerance) {
  const auto a = align(*session, {3.0}, 0.5);
  EXPECT_FALSE(a.at("/encoder_pulse"));
  EXPECT_FALSE(a.at("/camera_stub"));
}

TEST_F(AlignTest, ShrinkingToleranceNeverAdds) {
  for (double t = 0.8; t < 1.8; t += 0.013) {
    for (double tol = 0.5; tol > 0.001; tol /= 2) {
      const auto wide = align(*session, {t}, tol);
      const auto narrow = align(*session, {t}, tol / 2);
      for (const auto& [topic, rec] : narrow) {
        if (rec) {
          ASSERT_TRUE(wide.at(topic));
          ASSERT_EQ(*wide.at(topic), *rec);
        }
      }
    }
  }
}

class ReplayTest : public RecorderTest {
 protected:
  void SetUp() override {
    Recorder rec(bus, config({"/encoder_pulse", "/camera_stub"}, "orig"));
    drive(rec, 2.0);
    rec.stop({2.0});
  }

  // Replays `session` at `rate` starting at t = 0 and records it again.
  // Returns the time of the tick in which the replay finished.
  double replay_into(const Session& s, double rate, const std::string& name) {
    mir::bus::Bus b2;
    Replayer rp(b2, s, rate, {0.0});
    Recorder rec(b2, config({"/encoder_pulse", "/camera_stub"}, name));
    double finished = -1;
    for (int i = 0; i <= 10000 && finished < 0; ++i) {
      const Timestamp now{i * 0.001};
      rp.spin_once(now);
      rec.spin_once(now);
      if (rp.done()) finished = now.sec;
    }
    rec.stop({finished});
    return finished;
  }
};

TEST_F(ReplayTest, RoundTripIsByteIdentical) {
  const auto orig = Session::open(tmp / "orig");
  replay_into(orig, 1.0, "copy");
  EXPECT_EQ(read_file(log_path(tmp / "orig")), read_file(log_path(tmp / "copy")));
  const auto copy = Session::open(tmp / "copy");
  replay_into(copy, 1.0, "copy2");
  EXPECT_EQ(read_file(log_path(tmp / "orig")), read_file(log_path(tmp / "copy2")));
}

TEST_F(ReplayTest, DoubleRateHalvesDuration) {
  const auto orig = Session::open(tmp / "orig");
  const double span = orig.manifest().t_end - orig.manifest().t_start;
  const double at1 = replay_into(orig, 1.0, "r1");
  const double at2 = replay_into(orig, 2.0, "r2");
  EXPECT_NEAR(at1, span, 0.001);
  EXPECT_NEAR(at2, span / 2, 0.001);
  // Payload streams are unchanged by the rate.
  const auto r2 = Session::open(tmp / "r2");
  ASSERT_EQ(r2.records().size(), orig.records().size());
  for (std::size_t i = 0; i < orig.records().size(); ++i) {
    EXPECT_EQ(r2.records()[i].data, orig.records()[i].data);
  }
}

TEST_F(ReplayTest, EmptySessionCompletesImmediately) {
  {
    Recorder rec(bus, config({"/encoder_pulse"}, "empty"));
    rec.stop({0.0});
  }
  const auto s = Session::open(tmp / "empty");
  mir::bus::Bus b2;
  Replayer rp(b2, s, 1.0, {0.0});
  EXPECT_TRUE(rp.done());
  EXPECT_EQ(rp.summary().published, 0u);
  EXPECT_THROW(Replayer(b2, s, 0.0, {0.0}), mir::InvalidArgument);
}

}  // namespace
