#include "mir/bus.hpp"

#include <algorithm>
#include <sstream>

#include "mir/error.hpp"

namespace mir::bus {

std::optional<msgs::SchemaId> canonical_schema(std::string_view topic) {
  using msgs::SchemaId;
  if (topic == topics::kJoy) return SchemaId::kJoy;
  if (topic == topics::kVehicleControl) return SchemaId::kVehicleControl;
  if (topic == topics::kEncoderPulse) return SchemaId::kEncoderPulse;
  if (topic == topics::kImu) return SchemaId::kImu;
  if (topic == topics::kScan) return SchemaId::kLaserScan;
  if (topic == topics::kCamera) return SchemaId::kCameraStub;
  if (topic == topics::kHeartbeat) return SchemaId::kHeartbeat;
  return std::nullopt;
}

namespace {

void push(detail::Queue& q, const Envelope& env) {
  std::lock_guard lock(q.mu);
  if (q.items.size() >= q.depth) {
    q.items.pop_front();
    ++q.dropped;
  }
  q.items.push_back(env);
  ++q.received;
}

}  // namespace

void Publisher::publish(const msgs::Message& msg) const { bus_->publish(node_, topic_, msg); }

std::optional<Envelope> Subscription::poll() {
  if (!q_) return std::nullopt;
  std::lock_guard lock(q_->mu);
  if (q_->items.empty()) return std::nullopt;
  Envelope e = std::move(q_->items.front());
  q_->items.pop_front();
  return e;
}

std::vector<Envelope> Subscription::drain() {
  if (!q_) return {};
  std::lock_guard lock(q_->mu);
  std::vector<Envelope> out(std::make_move_iterator(q_->items.begin()),
                            std::make_move_iterator(q_->items.end()));
  q_->items.clear();
  return out;
}

std::uint64_t Subscription::dropped() const {
  if (!q_) return 0;
  std::lock_guard lock(q_->mu);
  return q_->dropped;
}

std::uint64_t Subscription::received() const {
  if (!q_) return 0;
  std::lock_guard lock(q_->mu);
  return q_->received;
}

bool Subscription::active() const {
  if (!q_) return false;
  std::lock_guard lock(q_->mu);
  return q_->active;
}

Graph Graph::restricted_to(const std::set<std::string>& vertices) const {
  Graph g;
  for (const auto& n : nodes) {
    if (vertices.contains(n)) g.nodes.insert(n);
  }
  for (const auto& t : topics) {
    if (vertices.contains(t)) g.topics.insert(t);
  }
  for (const auto& e : edges) {
    if (vertices.contains(e.first) && vertices.contains(e.second)) g.edges.insert(e);
  }
  return g;
}

std::string Graph::to_text() const {
  std::ostringstream os;
  os << "nodes:";
  for (const auto& n : nodes) os << ' ' << n;
  os << "\ntopics:";
  for (const auto& t : topics) os << ' ' << t;
  os << "\nedges:\n";
  for (const auto& [from, to] : edges) os << "  " << from << " -> " << to << '\n';
  return os.str();
}

std::string Graph::to_dot() const {
  std::ostringstream os;
  os << "digraph mir {\n";
  for (const auto& n : nodes) os << "  \"" << n << "\" [shape=ellipse];\n";
  for (const auto& t : topics) os << "  \"" << t << "\" [shape=box];\n";
  for (const auto& [from, to] : edges) os << "  \"" << from << "\" -> \"" << to << "\";\n";
  os << "}\n";
  return os.str();
}

NodeHandle Bus::create_node(std::string name) {
  if (name.empty() || name.front() == '/') {
    throw InvalidArgument("node name must be non-empty and must not start with '/': '" + name + "'");
  }
  std::lock_guard lock(mu_);
  for (const auto& [id, n] : nodes_) {
    if (n == name) throw InvalidArgument("node name already in use: " + name);
  }
  const std::uint64_t id = next_node_id_++;
  nodes_.emplace(id, name);
  return NodeHandle(id, std::move(name));
}

void Bus::shutdown_node(const NodeHandle& node) {
  std::lock_guard lock(mu_);
  if (nodes_.erase(node.id()) == 0) return;
  std::vector<std::string> touched;
  for (auto& [name, topic] : topics_) {
    const auto erased_pubs = topic.publishers.erase(node.id());
    const auto before = topic.subscribers.size();
    std::erase_if(topic.subscribers, [&](const SubEntry& s) {
      if (s.node != node.id()) return false;
      std::lock_guard qlock(s.queue->mu);
      s.queue->active = false;
      return true;
    });
    if (erased_pubs > 0 || topic.subscribers.size() != before) touched.push_back(name);
  }
  for (const auto& name : touched) prune(name);
}

void Bus::prune(const std::string& name) {
  const auto it = topics_.find(name);
  if (it != topics_.end() && it->second.publishers.empty() && it->second.subscribers.empty()) {
    topics_.erase(it);
  }
}

Publisher Bus::advertise(const NodeHandle& node, const TopicSpec& spec) {
  if (spec.name.empty() || spec.name.front() != '/') {
    throw InvalidArgument("topic name must start with '/': '" + spec.name + "'");
  }
  std::lock_guard lock(mu_);
  if (!nodes_.contains(node.id())) throw InvalidState("advertise: node " + node.name() + " is shut down");
  Topic& t = topics_[spec.name];
  if (t.schema && *t.schema != spec.schema) {
    const auto existing = *t.schema;
    prune(spec.name);
    throw SchemaConflict("topic " + spec.name + " already carries " +
                         std::string(msgs::schema_name(existing)) + ", cannot advertise " +
                         std::string(msgs::schema_name(spec.schema)));
  }
  t.schema = spec.schema;
  t.latch = t.latch || spec.latch;
  t.publishers.insert(node.id());
  return Publisher(this, node.id(), spec.name, spec.schema);
}

Subscription Bus::subscribe(const NodeHandle& node, std::string_view topic, std::uint16_t queue_depth) {
  if (queue_depth < 1) throw InvalidArgument("subscribe: queue depth must be at least 1");
  if (topic.empty() || topic.front() != '/') {
    throw InvalidArgument("topic name must start with '/': '" + std::string(topic) + "'");
  }
  std::lock_guard lock(mu_);
  if (!nodes_.contains(node.id())) throw InvalidState("subscribe: node " + node.name() + " is shut down");
  auto it = topics_.find(topic);
  if (it == topics_.end()) it = topics_.emplace(std::string(topic), Topic{}).first;
  auto q = std::make_shared<detail::Queue>();
  q->depth = queue_depth;
  if (it->second.latch && it->second.last) push(*q, *it->second.last);
  it->second.subscribers.push_back({node.id(), q});
  return Subscription(std::move(q), std::string(topic));
}

void Bus::unsubscribe(const Subscription& sub) {
  if (!sub.q_) return;
  std::lock_guard lock(mu_);
  const auto it = topics_.find(sub.topic_);
  if (it == topics_.end()) return;
  std::erase_if(it->second.subscribers, [&](const SubEntry& s) { return s.queue == sub.q_; });
  {
    std::lock_guard qlock(sub.q_->mu);
    sub.q_->active = false;
  }
  prune(sub.topic_);
}

void Bus::publish(std::uint64_t node, const std::string& topic, const msgs::Message& msg) {
  std::lock_guard lock(mu_);
  if (!nodes_.contains(node)) throw InvalidState("publish on " + topic + ": node is shut down");
  const auto it = topics_.find(topic);
  if (it == topics_.end() || !it->second.publishers.contains(node)) {
    throw InvalidState("publish on " + topic + ": not advertised by this node");
  }
  Topic& t = it->second;
  if (msgs::schema_of(msg) != *t.schema) {
    throw InvalidArgument("publish on " + topic + ": message is " +
                          std::string(msgs::schema_name(msgs::schema_of(msg))) + ", topic carries " +
                          std::string(msgs::schema_name(*t.schema)));
  }
  Envelope env{topic, t.next_seq++, next_global_seq_++, msg};
  for (const auto& s : t.subscribers) push(*s.queue, env);
  if (t.latch) t.last = std::move(env);
}

Graph Bus::graph() const {
  std::lock_guard lock(mu_);
  Graph g;
  for (const auto& [id, name] : nodes_) g.nodes.insert(name);
  for (const auto& [name, t] : topics_) {
    g.topics.insert(name);
    for (const auto id : t.publishers) g.edges.emplace(nodes_.at(id), name);
    for (const auto& s : t.subscribers) g.edges.emplace(name, nodes_.at(s.node));
  }
  return g;
}

bool Bus::has_topic(std::string_view topic) const {
  std::lock_guard lock(mu_);
  return topics_.find(topic) != topics_.end();
}

std::optional<msgs::SchemaId> Bus::topic_schema(std::string_view topic) const {
  std::lock_guard lock(mu_);
  const auto it = topics_.find(topic);
  if (it == topics_.end()) return std::nullopt;
  return it->second.schema;
}

std::uint64_t Bus::published_count(std::string_view topic) const {
  std::lock_guard lock(mu_);
  const auto it = topics_.find(topic);
  return it == topics_.end() ? 0 : it->second.next_seq;
}

}  // namespace mir::bus
