#include "mir/bridge.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "mir/error.hpp"
#include "mir/json_codec.hpp"
#include "mir/log.hpp"

namespace mir::cli {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using nlohmann::json;

namespace {
constexpr auto kPumpInterval = std::chrono::milliseconds(5);
constexpr std::uint16_t kClientQueueDepth = 10;
}  // namespace

class ClientSession;

class Bridge::Impl {
 public:
  Impl(bus::Bus& bus, std::uint16_t port, JoySink joy_sink, Clock clock)
      : bus_(bus),
        node_(bus.create_node(std::string(kNodeName))),
        joy_sink_(std::move(joy_sink)),
        clock_(std::move(clock)),
        acceptor_(ioc_) {
    try {
      const tcp::endpoint ep(net::ip::make_address("127.0.0.1"), port);
      acceptor_.open(ep.protocol());
      acceptor_.set_option(net::socket_base::reuse_address(true));
      acceptor_.bind(ep);
      acceptor_.listen();
    } catch (const boost::system::system_error& e) {
      bus_.shutdown_node(node_);
      throw IoError("bridge: cannot listen on port " + std::to_string(port) + ": " + e.what());
    }
    port_ = acceptor_.local_endpoint().port();
    accept();
    thread_ = std::thread([this] { ioc_.run(); });
  }

  ~Impl() { stop(); }

  void stop() {
    if (stopped_.exchange(true)) return;
    net::post(ioc_, [this] {
      boost::system::error_code ec;
      acceptor_.close(ec);
    });
    ioc_.stop();
    if (thread_.joinable()) thread_.join();
    bus_.shutdown_node(node_);
  }

  void accept();

  bus::Bus& bus_;
  bus::NodeHandle node_;
  JoySink joy_sink_;
  Clock clock_;
  net::io_context ioc_;
  tcp::acceptor acceptor_;
  std::thread thread_;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopped_{false};

  // Touched only from the io thread.
  std::map<std::string, bus::Publisher> publishers_;

  std::atomic<std::uint64_t> clients_{0};
  std::atomic<std::uint64_t> inbound_{0};
  std::atomic<std::uint64_t> outbound_{0};
  std::atomic<std::uint64_t> rejected_{0};
};

class ClientSession : public std::enable_shared_from_this<ClientSession> {
 public:
  ClientSession(tcp::socket socket, Bridge::Impl& bridge)
      : ws_(std::move(socket)), timer_(ws_.get_executor()), bridge_(bridge) {}

  void start() {
    ws_.text(true);
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      ++self->bridge_.clients_;
      self->read();
      self->pump();
    });
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->close();
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->handle(text);
      self->read();
    });
  }

  void handle(const std::string& text) {
    try {
      const json req = json::parse(text);
      const std::string op = req.at("op").get<std::string>();
      const std::string topic = req.at("topic").get<std::string>();
      if (op == "subscribe") {
        if (!subs_.contains(topic)) {
          subs_.emplace(topic, bridge_.bus_.subscribe(bridge_.node_, topic, kClientQueueDepth));
        }
      } else if (op == "unsubscribe") {
        if (auto it = subs_.find(topic); it != subs_.end()) {
          bridge_.bus_.unsubscribe(it->second);
          subs_.erase(it);
        }
      } else if (op == "publish") {
        publish(topic, req.at("msg"));
      } else {
        throw InvalidArgument("unknown op '" + op + "'");
      }
    } catch (const std::exception& e) {
      ++bridge_.rejected_;
      send(json{{"op", "error"}, {"error", e.what()}}.dump());
    }
  }

  void publish(const std::string& topic, const json& msg) {
    const Timestamp now = bridge_.clock_();
    if (topic == bus::topics::kJoy) {
      bridge_.joy_sink_(joy_from_json(msg, now));
    } else if (topic == bus::topics::kVehicleControl) {
      auto it = bridge_.publishers_.find(topic);
      if (it == bridge_.publishers_.end()) {
        it = bridge_.publishers_
                 .emplace(topic, bridge_.bus_.advertise(bridge_.node_,
                                                        {topic, msgs::SchemaId::kVehicleControl, false}))
                 .first;
      }
      msgs::VehicleControl c = control_from_json(msg, now);
      c.seq = control_seq_++;
      it->second.publish(c);
    } else {
      throw InvalidArgument("publishing to " + topic + " is not allowed over the bridge");
    }
    ++bridge_.inbound_;
  }

  void pump() {
    timer_.expires_after(kPumpInterval);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec || self->closed_) return;
      for (auto& [topic, sub] : self->subs_) {
        for (const auto& env : sub.drain()) {
          json out{{"topic", env.topic}, {"t", msgs::stamp_of(env.msg).sec}, {"msg", to_json(env.msg)}};
          self->send(out.dump());
          ++self->bridge_.outbound_;
        }
      }
      self->pump();
    });
  }

  void send(std::string text) {
    if (closed_) return;
    outbox_.push_back(std::move(text));
    if (outbox_.size() == 1) write();
  }

  void write() {
    ws_.async_write(net::buffer(outbox_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->close();
                        return;
                      }
                      self->outbox_.pop_front();
                      if (!self->outbox_.empty()) self->write();
                    });
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    timer_.cancel();
    for (auto& [topic, sub] : subs_) bridge_.bus_.unsubscribe(sub);
    subs_.clear();
    outbox_.clear();
    if (bridge_.clients_ > 0) --bridge_.clients_;
  }

  websocket::stream<beast::tcp_stream> ws_;
  net::steady_timer timer_;
  Bridge::Impl& bridge_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  std::map<std::string, bus::Subscription> subs_;
  std::uint32_t control_seq_ = 0;
  bool closed_ = false;
};

void Bridge::Impl::accept() {
  acceptor_.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;
    std::make_shared<ClientSession>(std::move(socket), *this)->start();
    accept();
  });
}

Bridge::Bridge(bus::Bus& bus, std::uint16_t port, JoySink joy_sink, Clock clock)
    : impl_(std::make_unique<Impl>(bus, port, std::move(joy_sink), std::move(clock))) {
  spdlog::info("bridge listening on 127.0.0.1:{}", impl_->port_);
}

Bridge::~Bridge() = default;

std::uint16_t Bridge::port() const { return impl_->port_; }

void Bridge::stop() { impl_->stop(); }

BridgeStats Bridge::stats() const {
  return {impl_->clients_.load(), impl_->inbound_.load(), impl_->outbound_.load(),
          impl_->rejected_.load()};
}

}  // namespace mir::cli
