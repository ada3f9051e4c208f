#pragma once

// Binary message layout: little-endian, float64 as IEEE 754 binary64, integers
// in two's complement, lists prefixed with a u16 element count. Fields are
// laid out in declaration order.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mir/msgs.hpp"

namespace mir::wire {

using Bytes = std::vector<std::uint8_t>;

Bytes serialize(const msgs::Message& msg);

// Throws DecodeError (naming `topic`) when the payload does not match the
// schema exactly; no partially decoded message is ever returned.
msgs::Message deserialize(std::span<const std::uint8_t> payload, msgs::SchemaId schema,
                          std::string_view topic);

template <class T>
T deserialize_as(std::span<const std::uint8_t> payload, msgs::SchemaId schema,
                 std::string_view topic) {
  return std::get<T>(deserialize(payload, schema, topic));
}

}  // namespace mir::wire
