#pragma once

#include <stdexcept>
#include <string>

namespace mir {

// Bad input to a pure operation (non-finite angle, oversized payload, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation not legal in the object's current state.
class InvalidState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Payload bytes do not match the schema of the topic they arrived on.
class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaConflict : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mir
