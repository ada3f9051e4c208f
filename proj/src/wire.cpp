#include "mir/wire.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "mir/error.hpp"
#include "mir/simd/kernels.hpp"

namespace mir::wire {

std::uint8_t checksum(std::span<const std::uint8_t> bytes) {
  return static_cast<std::uint8_t>(255 - (simd::byte_sum(bytes) & 0xFF));
}

Bytes encode_frame(const Frame& f) {
  if (f.payload.size() > kMaxPayload) {
    throw InvalidArgument("encode_frame: payload of " + std::to_string(f.payload.size()) +
                          " bytes exceeds the 1024-byte limit");
  }
  const auto len = static_cast<std::uint16_t>(f.payload.size());
  Bytes out;
  out.reserve(kFrameOverhead + len);
  out.push_back(kSync1);
  out.push_back(kSync2);
  out.push_back(static_cast<std::uint8_t>(len & 0xFF));
  out.push_back(static_cast<std::uint8_t>(len >> 8));
  out.push_back(checksum(std::span(out).subspan(2, 2)));
  out.push_back(static_cast<std::uint8_t>(f.topic_id & 0xFF));
  out.push_back(static_cast<std::uint8_t>(f.topic_id >> 8));
  out.insert(out.end(), f.payload.begin(), f.payload.end());
  out.push_back(checksum(std::span(out).subspan(5)));
  return out;
}

namespace {

constexpr std::array<TopicEntry, 5> kRegistry{{
    {topic_id::kVehicleControl, "/vehicle_control", msgs::SchemaId::kVehicleControl},
    {topic_id::kEncoderPulse, "/encoder_pulse", msgs::SchemaId::kEncoderPulse},
    {topic_id::kImu, "/imu", msgs::SchemaId::kImu},
    {topic_id::kScan, "/scan", msgs::SchemaId::kLaserScan},
    {topic_id::kHeartbeat, "/heartbeat", msgs::SchemaId::kHeartbeat},
}};

}  // namespace

std::span<const TopicEntry> TopicRegistry::entries() { return kRegistry; }

std::optional<TopicEntry> TopicRegistry::by_id(std::uint16_t id) {
  for (const auto& e : kRegistry) {
    if (e.id == id) return e;
  }
  return std::nullopt;
}

std::optional<TopicEntry> TopicRegistry::by_name(std::string_view name) {
  for (const auto& e : kRegistry) {
    if (e.name == name) return e;
  }
  return std::nullopt;
}

Frame make_frame(std::uint16_t topic_id, const msgs::Message& msg) {
  const auto entry = TopicRegistry::by_id(topic_id);
  if (!entry) throw InvalidArgument("make_frame: unregistered topic id " + std::to_string(topic_id));
  if (entry->schema != msgs::schema_of(msg)) {
    throw InvalidArgument("make_frame: message schema does not match topic " +
                          std::string(entry->name));
  }
  return Frame{topic_id, serialize(msg)};
}

msgs::Message decode_payload(const Frame& f) {
  const auto entry = TopicRegistry::by_id(f.topic_id);
  if (!entry) throw DecodeError("decode error: unregistered topic id " + std::to_string(f.topic_id));
  return deserialize(f.payload, entry->schema, entry->name);
}

std::vector<Frame> StreamDecoder::feed(std::span<const std::uint8_t> bytes) {
  std::vector<Frame> out;
  backlog_.insert(backlog_.end(), bytes.begin(), bytes.end());
  while (!backlog_.empty()) {
    const std::uint8_t b = backlog_.front();
    backlog_.pop_front();
    step(b, out);
  }
  return out;
}

void StreamDecoder::reject() {
  // Drop the failed frame's first sync byte and rescan everything after it.
  ++counters_.bytes_skipped;
  backlog_.insert(backlog_.begin(), candidate_.begin() + 1, candidate_.end());
  candidate_.clear();
  payload_.clear();
  state_ = State::kSync1;
}

void StreamDecoder::step(std::uint8_t b, std::vector<Frame>& out) {
  switch (state_) {
    case State::kSync1:
      if (b == kSync1) {
        candidate_.assign(1, b);
        state_ = State::kSync2;
      } else {
        ++counters_.bytes_skipped;
      }
      return;
    case State::kSync2:
      if (b == kSync2) {
        candidate_.push_back(b);
        field_bytes_ = 0;
        len_ = 0;
        state_ = State::kLen;
      } else if (b == kSync1) {
        // The previous 0xFF was noise; this one may start a frame.
        ++counters_.bytes_skipped;
      } else {
        counters_.bytes_skipped += 2;
        candidate_.clear();
        state_ = State::kSync1;
      }
      return;
    default:
      break;
  }

  candidate_.push_back(b);
  switch (state_) {
    case State::kLen:
      len_ |= static_cast<std::uint16_t>(b << (8 * field_bytes_));
      if (++field_bytes_ == 2) state_ = State::kLenCk;
      return;
    case State::kLenCk: {
      const std::uint8_t expect = checksum(std::span(candidate_).subspan(2, 2));
      if (b != expect) {
        ++counters_.frames_bad_checksum;
        reject();
      } else if (len_ > kMaxPayload) {
        ++counters_.frames_oversize;
        reject();
      } else {
        field_bytes_ = 0;
        topic_ = 0;
        state_ = State::kTopic;
      }
      return;
    }
    case State::kTopic:
      topic_ |= static_cast<std::uint16_t>(b << (8 * field_bytes_));
      if (++field_bytes_ == 2) {
        payload_.clear();
        payload_.reserve(len_);
        state_ = len_ == 0 ? State::kCk : State::kPayload;
      }
      return;
    case State::kPayload:
      payload_.push_back(b);
      if (payload_.size() == len_) state_ = State::kCk;
      return;
    case State::kCk: {
      const std::span<const std::uint8_t> body =
          std::span(candidate_).subspan(5, candidate_.size() - 6);
      if (b != checksum(body)) {
        ++counters_.frames_bad_checksum;
        reject();
        return;
      }
      ++counters_.frames_ok;
      out.push_back(Frame{topic_, std::move(payload_)});
      payload_.clear();
      candidate_.clear();
      state_ = State::kSync1;
      return;
    }
    default:
      return;
  }
}

}  // namespace mir::wire
