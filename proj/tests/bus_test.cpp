#include <atomic>
#include <thread>

#include <gtest/gtest.h>

#include "mir/bus.hpp"
#include "mir/error.hpp"

namespace {

using namespace mir::bus;
using mir::msgs::CameraStub;
using mir::msgs::EncoderPulse;
using mir::msgs::SchemaId;

TopicSpec pulse_spec(bool latch = false) {
  return {std::string(topics::kEncoderPulse), SchemaId::kEncoderPulse, latch};
}

EncoderPulse pulse(std::int64_t n) {
  EncoderPulse p;
  p.drive_count = n;
  return p;
}

TEST(Bus, EmptyGraph) {
  Bus bus;
  EXPECT_TRUE(bus.graph().empty());
}

TEST(Bus, NodeNames) {
  Bus bus;
  bus.create_node("a");
  EXPECT_THROW(bus.create_node("a"), mir::InvalidArgument);
  EXPECT_THROW(bus.create_node(""), mir::InvalidArgument);
  EXPECT_THROW(bus.create_node("/a"), mir::InvalidArgument);
}

TEST(Bus, AdvertiseAndConflict) {
  Bus bus;
  const auto a = bus.create_node("a");
  const auto b = bus.create_node("b");
  bus.advertise(a, pulse_spec());
  EXPECT_NO_THROW(bus.advertise(b, pulse_spec()));
  try {
    bus.advertise(b, {std::string(topics::kEncoderPulse), SchemaId::kImu, false});
    FAIL();
  } catch (const mir::SchemaConflict& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("EncoderPulse"), std::string::npos) << what;
    EXPECT_NE(what.find("ImuSample"), std::string::npos) << what;
  }
  const auto g = bus.graph();
  EXPECT_TRUE(g.topics.count("/encoder_pulse"));
  EXPECT_TRUE(g.edges.count({"a", "/encoder_pulse"}));
  EXPECT_TRUE(g.edges.count({"b", "/encoder_pulse"}));
}

TEST(Bus, OnePublisherTwoSubscribers) {
  Bus bus;
  const auto n = bus.create_node("n");
  auto pub = bus.advertise(n, pulse_spec());
  auto s1 = bus.subscribe(bus.create_node("s1"), topics::kEncoderPulse, 10);
  auto s2 = bus.subscribe(bus.create_node("s2"), topics::kEncoderPulse, 10);
  pub.publish(pulse(7));
  const auto e1 = s1.poll();
  const auto e2 = s2.poll();
  ASSERT_TRUE(e1 && e2);
  EXPECT_EQ(std::get<EncoderPulse>(e1->msg).drive_count, 7);
  EXPECT_EQ(e1->seq, 0u);
  EXPECT_EQ(e1->topic, "/encoder_pulse");
  EXPECT_FALSE(s1.poll());
}

TEST(Bus, NoSubscribersIsNoop) {
  Bus bus;
  auto pub = bus.advertise(bus.create_node("n"), pulse_spec());
  EXPECT_NO_THROW(pub.publish(pulse(1)));
  EXPECT_EQ(bus.published_count(topics::kEncoderPulse), 1u);
}

TEST(Bus, SubscribeBeforePublisherExists) {
  Bus bus;
  auto sub = bus.subscribe(bus.create_node("s"), topics::kScan, 5);
  EXPECT_FALSE(sub.poll());
  EXPECT_TRUE(bus.graph().edges.count({"/scan", "s"}));
}

TEST(Bus, DropOldestOnOverflow) {
  Bus bus;
  auto pub = bus.advertise(bus.create_node("n"), pulse_spec());
  auto sub = bus.subscribe(bus.create_node("s"), topics::kEncoderPulse, 2);
  for (int i = 1; i <= 3; ++i) pub.publish(pulse(i));
  const auto got = sub.drain();
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(std::get<EncoderPulse>(got[0].msg).drive_count, 2);
  EXPECT_EQ(std::get<EncoderPulse>(got[1].msg).drive_count, 3);
  EXPECT_EQ(sub.dropped(), 1u);
  EXPECT_EQ(sub.received(), 3u);
  EXPECT_THROW(bus.subscribe(bus.create_node("z"), topics::kEncoderPulse, 0), mir::InvalidArgument);
}

TEST(Bus, LatchedTopicServesLateSubscriber) {
  Bus bus;
  auto pub = bus.advertise(bus.create_node("n"), pulse_spec(true));
  pub.publish(pulse(1));
  pub.publish(pulse(2));
  auto late = bus.subscribe(bus.create_node("late"), topics::kEncoderPulse, 4);
  const auto got = late.drain();
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(std::get<EncoderPulse>(got[0].msg).drive_count, 2);
  EXPECT_EQ(got[0].seq, 1u);
}

TEST(Bus, UnlatchedTopicDoesNotReplay) {
  Bus bus;
  auto pub = bus.advertise(bus.create_node("n"), pulse_spec());
  pub.publish(pulse(1));
  auto late = bus.subscribe(bus.create_node("late"), topics::kEncoderPulse, 4);
  EXPECT_FALSE(late.poll());
}

TEST(Bus, SchemaMismatchOnPublish) {
  Bus bus;
  auto pub = bus.advertise(bus.create_node("n"), pulse_spec());
  EXPECT_THROW(pub.publish(CameraStub{}), mir::InvalidArgument);
}

TEST(Bus, OrderedDeliveryOf10k) {
  Bus bus;
  auto pub = bus.advertise(bus.create_node("n"), pulse_spec());
  auto sub = bus.subscribe(bus.create_node("s"), topics::kEncoderPulse, 10000);
  for (int i = 0; i < 10000; ++i) pub.publish(pulse(i));
  const auto got = sub.drain();
  ASSERT_EQ(got.size(), 10000u);
  for (std::size_t i = 0; i < got.size(); ++i) {
    ASSERT_EQ(got[i].seq, i);
    ASSERT_EQ(std::get<EncoderPulse>(got[i].msg).drive_count, static_cast<std::int64_t>(i));
  }
}

TEST(Bus, NoCrossTalk) {
  Bus bus;
  const auto n = bus.create_node("n");
  auto p1 = bus.advertise(n, pulse_spec());
  auto p2 = bus.advertise(n, {std::string(topics::kCamera), SchemaId::kCameraStub, false});
  auto s1 = bus.subscribe(bus.create_node("s"), topics::kEncoderPulse, 100);
  for (int i = 0; i < 50; ++i) {
    p1.publish(pulse(i));
    p2.publish(CameraStub{});
  }
  for (const auto& e : s1.drain()) ASSERT_EQ(e.topic, "/encoder_pulse");
}

// Several publishing threads, several consuming threads. Every subscriber
// sees a subsequence of one global order, and each publisher's own messages
// stay in the order it sent them.
TEST(Bus, ConcurrentPublishersShareOneOrder) {
  Bus bus;
  constexpr int kThreads = 4, kPerThread = 5000;
  std::vector<Publisher> pubs;
  for (int t = 0; t < kThreads; ++t) pubs.push_back(bus.advertise(bus.create_node("p" + std::to_string(t)), pulse_spec()));
  auto s1 = bus.subscribe(bus.create_node("s1"), topics::kEncoderPulse, kThreads * kPerThread);
  auto s2 = bus.subscribe(bus.create_node("s2"), topics::kEncoderPulse, 64);

  std::atomic<bool> done{false};
  std::vector<Envelope> small;
  std::thread consumer([&] {
    while (!done.load()) {
      auto got = s2.drain();
      small.insert(small.end(), got.begin(), got.end());
    }
    auto got = s2.drain();
    small.insert(small.end(), got.begin(), got.end());
  });
  std::vector<std::thread> producers;
  for (int t = 0; t < kThreads; ++t) {
    producers.emplace_back([&, t] {
      for (int i = 0; i < kPerThread; ++i) pubs[t].publish(pulse(t * 1000000 + i));
    });
  }
  for (auto& p : producers) p.join();
  done = true;
  consumer.join();

  const auto all = s1.drain();
  ASSERT_EQ(all.size(), static_cast<std::size_t>(kThreads * kPerThread));
  std::vector<std::int64_t> last(kThreads, -1);
  for (std::size_t i = 0; i < all.size(); ++i) {
    ASSERT_EQ(all[i].seq, i);
    const auto v = std::get<EncoderPulse>(all[i].msg).drive_count;
    ASSERT_GT(v % 1000000, last[v / 1000000]);
    last[v / 1000000] = v % 1000000;
  }
  for (std::size_t i = 1; i < small.size(); ++i) ASSERT_LT(small[i - 1].seq, small[i].seq);
  EXPECT_EQ(small.size() + s2.dropped(), all.size());
}

TEST(Bus, ShutdownRemovesEdges) {
  Bus bus;
  const auto a = bus.create_node("a");
  const auto b = bus.create_node("b");
  auto pub = bus.advertise(a, pulse_spec());
  auto sub = bus.subscribe(b, topics::kEncoderPulse, 4);
  bus.shutdown_node(a);
  auto g = bus.graph();
  EXPECT_FALSE(g.nodes.count("a"));
  EXPECT_FALSE(g.edges.count({"a", "/encoder_pulse"}));
  EXPECT_TRUE(g.edges.count({"/encoder_pulse", "b"}));
  EXPECT_THROW(pub.publish(pulse(1)), mir::InvalidState);

  bus.shutdown_node(b);
  EXPECT_TRUE(bus.graph().empty());
  EXPECT_FALSE(sub.active());
  EXPECT_FALSE(bus.has_topic(topics::kEncoderPulse));
}

TEST(Bus, Unsubscribe) {
  Bus bus;
  auto pub = bus.advertise(bus.create_node("a"), pulse_spec());
  auto sub = bus.subscribe(bus.create_node("b"), topics::kEncoderPulse, 4);
  bus.unsubscribe(sub);
  pub.publish(pulse(1));
  EXPECT_FALSE(sub.poll());
  EXPECT_FALSE(bus.graph().edges.count({"/encoder_pulse", "b"}));
}

TEST(Graph, TextAndDot) {
  Bus bus;
  bus.advertise(bus.create_node("a"), pulse_spec());
  bus.subscribe(bus.create_node("b"), topics::kEncoderPulse, 1);
  const auto g = bus.graph();
  EXPECT_NE(g.to_text().find("a -> /encoder_pulse"), std::string::npos);
  EXPECT_NE(g.to_dot().find("\"/encoder_pulse\" -> \"b\""), std::string::npos) << g.to_dot();
  const auto sub = g.restricted_to({"a", "/encoder_pulse"});
  EXPECT_EQ(sub.edges.size(), 1u);
  EXPECT_EQ(sub.nodes, std::set<std::string>{"a"});
}

TEST(CanonicalSchema, Table) {
  EXPECT_EQ(canonical_schema("/joy"), SchemaId::kJoy);
  EXPECT_EQ(canonical_schema("/camera_stub"), SchemaId::kCameraStub);
  EXPECT_FALSE(canonical_schema("/nope"));
}

}  // namespace
