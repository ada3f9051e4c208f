#include "mir/byte_pipe.hpp"

#include "mir/error.hpp"

namespace mir::wire {

namespace {

LinkConfig checked(LinkConfig cfg) {
  if (!(cfg.latency >= 0.0)) throw InvalidArgument("link latency must be non-negative");
  if (!(cfg.drop_probability >= 0.0 && cfg.drop_probability <= 1.0)) {
    throw InvalidArgument("link drop probability must lie in [0, 1]");
  }
  return cfg;
}

}  // namespace

BytePipe::BytePipe(LinkConfig cfg, std::uint64_t seed)
    : cfg_(checked(cfg)), rng_(seed), drop_(cfg_.drop_probability) {}

void BytePipe::write(std::span<const std::uint8_t> bytes, Timestamp now) {
  for (std::uint8_t b : bytes) {
    ++written_;
    if (cfg_.drop_probability > 0.0 && drop_(rng_)) {
      ++dropped_;
      continue;
    }
    queue_.push_back({now.sec + cfg_.latency, b});
  }
}

std::vector<std::uint8_t> BytePipe::read(Timestamp now) {
  std::vector<std::uint8_t> out;
  while (!queue_.empty() && queue_.front().ready <= now.sec) {
    out.push_back(queue_.front().byte);
    queue_.pop_front();
  }
  return out;
}

}  // namespace mir::wire
