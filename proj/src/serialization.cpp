#include "mir/serialization.hpp"

#include <bit>
#include <limits>
#include <string>
#include <type_traits>

#include "mir/error.hpp"

namespace mir::wire {

namespace {

using msgs::SchemaId;

class Writer {
 public:
  explicit Writer(Bytes& out) : out_(out) {}

  template <class T>
  void uint(T v) {
    static_assert(std::is_unsigned_v<T>);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { uint(v); }
  void u32(std::uint32_t v) { uint(v); }
  void u64(std::uint64_t v) { uint(v); }
  void i64(std::int64_t v) { uint(static_cast<std::uint64_t>(v)); }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
  void stamp(Timestamp t) { f64(t.sec); }
  void vec3(const msgs::Vector3& v) {
    f64(v.x);
    f64(v.y);
    f64(v.z);
  }

  template <class T, class Fn>
  void list(const std::vector<T>& items, Fn&& each) {
    if (items.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw InvalidArgument("serialize: list longer than 65535 elements");
    }
    u16(static_cast<std::uint16_t>(items.size()));
    for (const auto& it : items) each(it);
  }

 private:
  Bytes& out_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> in, std::string_view topic) : in_(in), topic_(topic) {}

  template <class T>
  T uint() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(static_cast<T>(in_[pos_ + i]) << (8 * i));
    }
    pos_ += sizeof(T);
    return v;
  }
  std::uint8_t u8() { return uint<std::uint8_t>(); }
  std::uint16_t u16() { return uint<std::uint16_t>(); }
  std::uint32_t u32() { return uint<std::uint32_t>(); }
  std::uint64_t u64() { return uint<std::uint64_t>(); }
  std::int64_t i64() { return static_cast<std::int64_t>(uint<std::uint64_t>()); }
  double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }
  Timestamp stamp() { return {f64()}; }
  msgs::Vector3 vec3() {
    msgs::Vector3 v;
    v.x = f64();
    v.y = f64();
    v.z = f64();
    return v;
  }

  template <class T, class Fn>
  std::vector<T> list(Fn&& each) {
    const std::uint16_t n = u16();
    std::vector<T> out;
    out.reserve(n);
    for (std::uint16_t i = 0; i < n; ++i) out.push_back(each());
    return out;
  }

  void finish() const {
    if (pos_ != in_.size()) {
      fail(std::to_string(in_.size() - pos_) + " trailing bytes");
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DecodeError("decode error on topic " + std::string(topic_) + ": " + what);
  }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) fail("payload truncated");
  }

  std::span<const std::uint8_t> in_;
  std::string_view topic_;
  std::size_t pos_ = 0;
};

void write(Writer& w, const msgs::VehicleControl& m) {
  w.f64(m.steering);
  w.f64(m.throttle);
  w.stamp(m.stamp);
  w.u32(m.seq);
}

void write(Writer& w, const msgs::EncoderPulse& m) {
  w.i64(m.drive_count);
  w.i64(m.steer_count);
  w.stamp(m.stamp);
  w.u32(m.seq);
}

void write(Writer& w, const msgs::ImuSample& m) {
  w.vec3(m.accel);
  w.vec3(m.gyro);
  w.vec3(m.mag);
  w.f64(m.orientation.w);
  w.f64(m.orientation.x);
  w.f64(m.orientation.y);
  w.f64(m.orientation.z);
  w.u8(static_cast<std::uint8_t>(m.frame));
  w.stamp(m.stamp);
}

void write(Writer& w, const msgs::LaserScan& m) {
  w.f64(m.angle_min);
  w.f64(m.angle_increment);
  w.list(m.ranges, [&](double r) { w.f64(r); });
  w.f64(m.range_max);
  w.list(m.valid, [&](std::uint8_t v) { w.u8(v); });
  w.stamp(m.stamp);
}

void write(Writer& w, const msgs::Heartbeat& m) {
  w.u64(m.frames_ok);
  w.u64(m.frames_bad_checksum);
  w.u64(m.invalid_transitions);
  w.u64(m.clamp_count);
  w.u64(m.stale_count);
  w.u64(m.malformed_count);
  w.stamp(m.stamp);
}

void write(Writer& w, const msgs::JoyState& m) {
  w.list(m.axes, [&](double a) { w.f64(a); });
  w.list(m.buttons, [&](std::uint8_t b) { w.u8(b); });
  w.stamp(m.stamp);
}

void write(Writer& w, const msgs::CameraStub& m) {
  w.u32(m.frame_counter);
  w.stamp(m.stamp);
}

msgs::Message read(Reader& r, SchemaId schema) {
  switch (schema) {
    case SchemaId::kVehicleControl: {
      msgs::VehicleControl m;
      m.steering = r.f64();
      m.throttle = r.f64();
      m.stamp = r.stamp();
      m.seq = r.u32();
      return m;
    }
    case SchemaId::kEncoderPulse: {
      msgs::EncoderPulse m;
      m.drive_count = r.i64();
      m.steer_count = r.i64();
      m.stamp = r.stamp();
      m.seq = r.u32();
      return m;
    }
    case SchemaId::kImu: {
      msgs::ImuSample m;
      m.accel = r.vec3();
      m.gyro = r.vec3();
      m.mag = r.vec3();
      m.orientation.w = r.f64();
      m.orientation.x = r.f64();
      m.orientation.y = r.f64();
      m.orientation.z = r.f64();
      const std::uint8_t frame = r.u8();
      if (frame > 1) r.fail("unknown IMU frame tag " + std::to_string(frame));
      m.frame = static_cast<msgs::ImuFrame>(frame);
      m.stamp = r.stamp();
      return m;
    }
    case SchemaId::kLaserScan: {
      msgs::LaserScan m;
      m.angle_min = r.f64();
      m.angle_increment = r.f64();
      m.ranges = r.list<double>([&] { return r.f64(); });
      m.range_max = r.f64();
      m.valid = r.list<std::uint8_t>([&] { return r.u8(); });
      m.stamp = r.stamp();
      if (m.ranges.size() != msgs::kScanBeams || m.valid.size() != msgs::kScanBeams) {
        r.fail("scan must carry exactly 360 beams");
      }
      return m;
    }
    case SchemaId::kHeartbeat: {
      msgs::Heartbeat m;
      m.frames_ok = r.u64();
      m.frames_bad_checksum = r.u64();
      m.invalid_transitions = r.u64();
      m.clamp_count = r.u64();
      m.stale_count = r.u64();
      m.malformed_count = r.u64();
      m.stamp = r.stamp();
      return m;
    }
    case SchemaId::kJoy: {
      msgs::JoyState m;
      m.axes = r.list<double>([&] { return r.f64(); });
      m.buttons = r.list<std::uint8_t>([&] { return r.u8(); });
      m.stamp = r.stamp();
      return m;
    }
    case SchemaId::kCameraStub: {
      msgs::CameraStub m;
      m.frame_counter = r.u32();
      m.stamp = r.stamp();
      return m;
    }
  }
  r.fail("unknown schema id " + std::to_string(static_cast<int>(schema)));
}

}  // namespace

Bytes serialize(const msgs::Message& msg) {
  Bytes out;
  Writer w(out);
  std::visit([&](const auto& m) { write(w, m); }, msg);
  return out;
}

msgs::Message deserialize(std::span<const std::uint8_t> payload, SchemaId schema,
                          std::string_view topic) {
  Reader r(payload, topic);
  msgs::Message m = read(r, schema);
  r.finish();
  return m;
}

}  // namespace mir::wire
