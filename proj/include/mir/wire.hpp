#pragma once

// Serial framing between the emulated control unit and the host.
//
//   0xFF 0xFE | len:u16 LE | ck(len) | topic:u16 LE | payload[len] | ck(topic + payload)
//
// ck(bytes) = 255 - (sum(bytes) mod 256). See docs/protocol.md.

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mir/msgs.hpp"
#include "mir/serialization.hpp"

namespace mir::wire {

inline constexpr std::uint8_t kSync1 = 0xFF;
inline constexpr std::uint8_t kSync2 = 0xFE;
inline constexpr std::size_t kMaxPayload = 1024;
inline constexpr std::size_t kFrameOverhead = 8;

namespace topic_id {
inline constexpr std::uint16_t kVehicleControl = 1;
inline constexpr std::uint16_t kEncoderPulse = 2;
inline constexpr std::uint16_t kImu = 3;
inline constexpr std::uint16_t kScan = 4;
inline constexpr std::uint16_t kHeartbeat = 5;
}  // namespace topic_id

struct Frame {
  std::uint16_t topic_id = 0;
  Bytes payload;

  bool operator==(const Frame&) const = default;
};

std::uint8_t checksum(std::span<const std::uint8_t> bytes);

// Throws InvalidArgument when the payload exceeds kMaxPayload.
Bytes encode_frame(const Frame& f);

struct TopicEntry {
  std::uint16_t id;
  std::string_view name;
  msgs::SchemaId schema;
};

// Fixed, bijective id <-> topic table for the serial link.
class TopicRegistry {
 public:
  static std::span<const TopicEntry> entries();
  static std::optional<TopicEntry> by_id(std::uint16_t id);
  static std::optional<TopicEntry> by_name(std::string_view name);
};

// Builds a frame for a message on a registered link topic.
Frame make_frame(std::uint16_t topic_id, const msgs::Message& msg);

// Decodes a frame payload according to the registry. Throws DecodeError.
msgs::Message decode_payload(const Frame& f);

struct DecoderCounters {
  std::uint64_t frames_ok = 0;
  std::uint64_t frames_bad_checksum = 0;
  std::uint64_t frames_oversize = 0;
  // Every consumed byte is either part of an accepted frame or counted here.
  std::uint64_t bytes_skipped = 0;

  bool operator==(const DecoderCounters&) const = default;
};

// Incremental byte-stream decoder. Corruption is never reported as an error:
// a rejected candidate frame is dropped and scanning resumes at the byte after
// its first sync byte, so a real frame hidden inside a false one is still found.
class StreamDecoder {
 public:
  enum class State { kSync1, kSync2, kLen, kLenCk, kTopic, kPayload, kCk };

  std::vector<Frame> feed(std::span<const std::uint8_t> bytes);

  State state() const { return state_; }
  const DecoderCounters& counters() const { return counters_; }

 private:
  void step(std::uint8_t b, std::vector<Frame>& out);
  void reject();

  State state_ = State::kSync1;
  std::deque<std::uint8_t> backlog_;
  Bytes candidate_;  // bytes of the frame being assembled, from its first sync byte
  std::size_t field_bytes_ = 0;
  std::uint16_t len_ = 0;
  std::uint16_t topic_ = 0;
  Bytes payload_;
  DecoderCounters counters_;
};

}  // namespace mir::wire
