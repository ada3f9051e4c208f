#pragma once

// In-process publish/subscribe node graph.
//
// Publishing is atomic per message: it is copied into every matching
// subscription queue while the bus lock is held, so all subscribers of a
// topic observe the same total order. Queues are bounded and drop their
// oldest entry on overflow.

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mir/msgs.hpp"

namespace mir::bus {

namespace topics {
inline constexpr std::string_view kJoy = "/joy";
inline constexpr std::string_view kVehicleControl = "/vehicle_control";
inline constexpr std::string_view kEncoderPulse = "/encoder_pulse";
inline constexpr std::string_view kImu = "/imu";
inline constexpr std::string_view kScan = "/scan";
inline constexpr std::string_view kCamera = "/camera_stub";
inline constexpr std::string_view kHeartbeat = "/heartbeat";
}  // namespace topics

// Schema of each canonical topic, or nullopt for names outside the set.
std::optional<msgs::SchemaId> canonical_schema(std::string_view topic);

struct TopicSpec {
  std::string name;
  msgs::SchemaId schema;
  bool latch = false;
};

struct Envelope {
  std::string topic;
  std::uint64_t seq = 0;         // per topic, starts at 0
  std::uint64_t global_seq = 0;  // across the whole bus
  msgs::Message msg;
};

class Bus;

class NodeHandle {
 public:
  const std::string& name() const { return name_; }
  std::uint64_t id() const { return id_; }

 private:
  friend class Bus;
  NodeHandle(std::uint64_t id, std::string name) : id_(id), name_(std::move(name)) {}

  std::uint64_t id_;
  std::string name_;
};

class Publisher {
 public:
  // Throws InvalidArgument when msg does not match the topic schema and
  // InvalidState when the owning node has been shut down.
  void publish(const msgs::Message& msg) const;

  const std::string& topic() const { return topic_; }
  msgs::SchemaId schema() const { return schema_; }

 private:
  friend class Bus;
  Publisher(Bus* bus, std::uint64_t node, std::string topic, msgs::SchemaId schema)
      : bus_(bus), node_(node), topic_(std::move(topic)), schema_(schema) {}

  Bus* bus_;
  std::uint64_t node_;
  std::string topic_;
  msgs::SchemaId schema_;
};

namespace detail {
struct Queue {
  std::mutex mu;
  std::deque<Envelope> items;
  std::size_t depth = 1;
  std::uint64_t dropped = 0;
  std::uint64_t received = 0;
  bool active = true;
};
}  // namespace detail

class Subscription {
 public:
  Subscription() = default;

  std::optional<Envelope> poll();
  std::vector<Envelope> drain();

  std::uint64_t dropped() const;
  std::uint64_t received() const;
  bool active() const;
  const std::string& topic() const { return topic_; }

 private:
  friend class Bus;
  Subscription(std::shared_ptr<detail::Queue> q, std::string topic)
      : q_(std::move(q)), topic_(std::move(topic)) {}

  std::shared_ptr<detail::Queue> q_;
  std::string topic_;
};

// Bipartite node/topic graph. Edges run node -> topic for publications and
// topic -> node for subscriptions. Topic names start with '/', node names do not.
struct Graph {
  std::set<std::string> nodes;
  std::set<std::string> topics;
  std::set<std::pair<std::string, std::string>> edges;

  bool empty() const { return nodes.empty() && topics.empty() && edges.empty(); }
  bool operator==(const Graph&) const = default;

  // Subgraph induced by the given vertex names.
  Graph restricted_to(const std::set<std::string>& vertices) const;

  std::string to_text() const;
  std::string to_dot() const;
};

class Bus {
 public:
  Bus() = default;
  Bus(const Bus&) = delete;
  Bus& operator=(const Bus&) = delete;

  // Throws InvalidArgument when the name is empty, starts with '/' or is taken.
  NodeHandle create_node(std::string name);

  // Removes every publication and subscription of the node. Topics left with
  // neither disappear from the graph.
  void shutdown_node(const NodeHandle& node);

  // Throws SchemaConflict naming both schemas when the topic already carries another.
  Publisher advertise(const NodeHandle& node, const TopicSpec& spec);

  // Delivers messages published after this call (plus the latched one, if any).
  Subscription subscribe(const NodeHandle& node, std::string_view topic, std::uint16_t queue_depth);

  // Detaches one subscription; its queue stops receiving.
  void unsubscribe(const Subscription& sub);

  Graph graph() const;

  bool has_topic(std::string_view topic) const;
  std::optional<msgs::SchemaId> topic_schema(std::string_view topic) const;
  std::uint64_t published_count(std::string_view topic) const;

 private:
  friend class Publisher;

  struct SubEntry {
    std::uint64_t node;
    std::shared_ptr<detail::Queue> queue;
  };
  struct Topic {
    std::optional<msgs::SchemaId> schema;
    bool latch = false;
    std::multiset<std::uint64_t> publishers;
    std::vector<SubEntry> subscribers;
    std::optional<Envelope> last;
    std::uint64_t next_seq = 0;
  };

  void publish(std::uint64_t node, const std::string& topic, const msgs::Message& msg);
  void prune(const std::string& topic);

  mutable std::mutex mu_;
  std::uint64_t next_node_id_ = 1;
  std::uint64_t next_global_seq_ = 0;
  std::map<std::uint64_t, std::string> nodes_;
  std::map<std::string, Topic, std::less<>> topics_;
};

}  // namespace mir::bus
