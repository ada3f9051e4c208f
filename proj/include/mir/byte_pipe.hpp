#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <span>
#include <vector>

#include "mir/msgs.hpp"

namespace mir::wire {

struct LinkConfig {
  double latency = 0.0;           // seconds added to every byte
  double drop_probability = 0.0;  // independent per byte
};

// One-directional in-process serial line on the simulation clock. A byte
// written at time t becomes readable at t + latency unless it is dropped.
class BytePipe {
 public:
  explicit BytePipe(LinkConfig cfg = {}, std::uint64_t seed = 0);

  void write(std::span<const std::uint8_t> bytes, Timestamp now);
  std::vector<std::uint8_t> read(Timestamp now);

  std::uint64_t bytes_written() const { return written_; }
  std::uint64_t bytes_dropped() const { return dropped_; }
  std::size_t in_flight() const { return queue_.size(); }

 private:
  struct Pending {
    double ready;
    std::uint8_t byte;
  };

  LinkConfig cfg_;
  std::mt19937_64 rng_;
  std::bernoulli_distribution drop_;
  std::deque<Pending> queue_;
  std::uint64_t written_ = 0;
  std::uint64_t dropped_ = 0;
};

}  // namespace mir::wire
