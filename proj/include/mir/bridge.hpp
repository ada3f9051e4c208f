#pragma once

// WebSocket bridge between browser clients and the bus.
//
// Client -> server text messages:
//   {"op":"subscribe","topic":"/encoder_pulse"}
//   {"op":"unsubscribe","topic":"/encoder_pulse"}
//   {"op":"publish","topic":"/joy","msg":{"axes":[0.0,1.0],"buttons":[]}}
//   {"op":"publish","topic":"/vehicle_control","msg":{"steering":0,"throttle":0.5}}
// Server -> client:
//   {"topic":"/encoder_pulse","t":12.34,"msg":{...}}
//   {"op":"error","error":"..."} for rejected requests

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>

#include "mir/bus.hpp"
#include "mir/msgs.hpp"

namespace mir::cli {

struct BridgeStats {
  std::uint64_t clients_connected = 0;
  std::uint64_t inbound_publishes = 0;
  std::uint64_t outbound_messages = 0;
  std::uint64_t rejected_requests = 0;
};

class Bridge {
 public:
  static constexpr std::string_view kNodeName = "bridge";

  using JoySink = std::function<void(const msgs::JoyState&)>;
  using Clock = std::function<Timestamp()>;

  // Binds to 127.0.0.1:port (0 picks a free port) and starts serving on a
  // background thread. /joy publishes are handed to `joy_sink`; everything
  // else goes straight onto the bus. Throws IoError when the port is busy.
  Bridge(bus::Bus& bus, std::uint16_t port, JoySink joy_sink, Clock clock);
  ~Bridge();
  Bridge(const Bridge&) = delete;
  Bridge& operator=(const Bridge&) = delete;

  std::uint16_t port() const;
  BridgeStats stats() const;
  void stop();

  class Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace mir::cli
