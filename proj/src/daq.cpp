#include "mir/daq.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "mir/error.hpp"
#include "mir/log.hpp"

namespace mir::daq {

using ordered_json = nlohmann::ordered_json;

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

wire::Bytes base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw DecodeError("base64: length is not a multiple of 4");
  wire::Bytes out(3 * (text.size() / 4));
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw DecodeError("base64: invalid character");
  std::size_t pad = 0;
  if (!text.empty() && text.back() == '=') ++pad;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

void RecordingConfig::validate() const {
  if (topics.empty()) throw ConfigError("daq.topics must name at least one topic");
  if (session_name.empty()) throw ConfigError("daq.session_name must not be empty");
  if (!(flush_interval > 0.0)) throw ConfigError("daq.flush_interval must be positive");
}

std::string to_jsonl(const LogRecord& r) {
  ordered_json j;
  j["t"] = r.t.sec;
  j["topic"] = r.topic;
  j["seq"] = r.seq;
  j["schema"] = static_cast<int>(r.schema);
  j["data"] = base64_encode(r.data);
  return j.dump();
}

LogRecord parse_jsonl(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    LogRecord r;
    r.t = {j.at("t").get<double>()};
    r.topic = j.at("topic").get<std::string>();
    r.seq = j.at("seq").get<std::uint32_t>();
    const int schema = j.at("schema").get<int>();
    if (schema < 1 || schema > 7) throw DecodeError("unknown schema id " + std::to_string(schema));
    r.schema = static_cast<msgs::SchemaId>(schema);
    r.data = base64_decode(j.at("data").get<std::string>());
    if (!std::isfinite(r.t.sec)) throw DecodeError("non-finite time stamp");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("log record: ") + e.what());
  }
}

std::string Manifest::to_json() const {
  ordered_json j;
  j["session"] = session;
  j["topics"] = topics;
  ordered_json counts_json = ordered_json::object();
  for (const auto& [topic, n] : counts) counts_json[topic] = n;
  j["counts"] = counts_json;
  j["t_start"] = t_start;
  j["t_end"] = t_end;
  j["truncated"] = truncated;
  j["dropped"] = dropped;
  return j.dump(2) + "\n";
}

Manifest Manifest::from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Manifest m;
    m.session = j.at("session").get<std::string>();
    m.topics = j.at("topics").get<std::vector<std::string>>();
    m.counts = j.at("counts").get<std::map<std::string, std::uint64_t>>();
    m.t_start = j.at("t_start").get<double>();
    m.t_end = j.at("t_end").get<double>();
    m.truncated = j.at("truncated").get<bool>();
    m.dropped = j.value("dropped", std::uint64_t{0});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("manifest: ") + e.what());
  }
}

Recorder::Recorder(bus::Bus& bus, RecordingConfig cfg, Timestamp now)
    : bus_(bus),
      cfg_(std::move(cfg)),
      dir_(cfg_.session_dir()),
      node_([&]() -> bus::NodeHandle {
        cfg_.validate();
        for (const auto& t : cfg_.topics) {
          if (!bus.has_topic(t)) throw ConfigError("daq: unknown topic " + t);
        }
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw IoError("daq: cannot create " + dir_.string() + ": " + ec.message());
        return bus.create_node(std::string(kNodeName));
      }()) {
  out_.open(log_path(dir_), std::ios::out | std::ios::trunc | std::ios::binary);
  if (!out_) {
    bus_.shutdown_node(node_);
    throw IoError("daq: cannot open " + log_path(dir_).string() + " for writing");
  }
  for (const auto& t : cfg_.topics) {
    subs_.push_back(bus_.subscribe(node_, t, std::numeric_limits<std::uint16_t>::max()));
    manifest_.counts[t] = 0;
  }
  manifest_.session = cfg_.session_name;
  manifest_.topics = cfg_.topics;
  manifest_.t_start = now.sec;
  manifest_.t_end = now.sec;
  last_flush_ = now.sec;
}

Recorder::~Recorder() {
  try {
    if (!stopped_) stop(Timestamp{manifest_.t_end});
  } catch (const std::exception& e) {
    spdlog::error("daq: failed to finalize {}: {}", dir_.string(), e.what());
  }
}

void Recorder::check_stream() {
  if (out_) return;
  recording_ = false;
  manifest_.truncated = true;
  spdlog::error("daq: write to {} failed, recording stopped", log_path(dir_).string());
}

void Recorder::write(const bus::Envelope& env) {
  const Timestamp t = msgs::stamp_of(env.msg);
  if (auto it = last_t_.find(env.topic); it != last_t_.end() && t.sec < it->second) {
    throw InvalidState("daq: time went backwards on " + env.topic);
  }
  last_t_[env.topic] = t.sec;

  LogRecord r{t, env.topic, static_cast<std::uint32_t>(env.seq), msgs::schema_of(env.msg),
              wire::serialize(env.msg)};
  out_ << to_jsonl(r) << '\n';
  check_stream();
  if (!recording_) return;
  ++manifest_.counts[env.topic];
  if (!any_record_) manifest_.t_start = t.sec;
  any_record_ = true;
  manifest_.t_end = std::max(manifest_.t_end, t.sec);
}

void Recorder::spin_once(Timestamp now) {
  if (!recording_) return;
  std::vector<bus::Envelope> batch;
  for (auto& s : subs_) {
    auto items = s.drain();
    std::move(items.begin(), items.end(), std::back_inserter(batch));
  }
  std::sort(batch.begin(), batch.end(),
            [](const bus::Envelope& a, const bus::Envelope& b) { return a.global_seq < b.global_seq; });
  for (const auto& env : batch) {
    write(env);
    if (!recording_) return;
  }
  if (now.sec - last_flush_ >= cfg_.flush_interval) {
    out_.flush();
    check_stream();
    last_flush_ = now.sec;
  }
}

const Manifest& Recorder::stop(Timestamp now) {
  if (stopped_) return manifest_;
  spin_once(now);
  stopped_ = true;
  if (recording_) {
    out_.flush();
    check_stream();
  }
  recording_ = false;
  out_.close();
  for (const auto& s : subs_) manifest_.dropped += s.dropped();
  bus_.shutdown_node(node_);

  std::ofstream m(manifest_path(dir_), std::ios::out | std::ios::trunc | std::ios::binary);
  m << manifest_.to_json();
  if (!m) throw IoError("daq: cannot write manifest in " + dir_.string());
  return manifest_;
}

Session Session::open(const std::filesystem::path& dir) {
  Session s;
  std::ifstream m(manifest_path(dir), std::ios::binary);
  if (!m) throw IoError("session " + dir.string() + " has no manifest.json");
  std::stringstream buf;
  buf << m.rdbuf();
  s.manifest_ = Manifest::from_json(buf.str());

  std::ifstream log(log_path(dir), std::ios::binary);
  if (!log) throw IoError("session " + dir.string() + " has no log.jsonl");
  std::string line;
  while (std::getline(log, line)) {
    if (line.empty()) continue;
    try {
      s.records_.push_back(parse_jsonl(line));
    } catch (const DecodeError& e) {
      ++s.corrupt_lines_;
      spdlog::warn("session {}: skipping corrupt line: {}", dir.string(), e.what());
    }
  }
  return s;
}

std::vector<const LogRecord*> Session::topic_records(std::string_view topic) const {
  std::vector<const LogRecord*> out;
  for (const auto& r : records_) {
    if (r.topic == topic) out.push_back(&r);
  }
  return out;
}

std::map<std::string, std::optional<LogRecord>> align(const Session& session, Timestamp t,
                                                      double tolerance) {
  std::map<std::string, std::optional<LogRecord>> out;
  std::map<std::string, std::vector<const LogRecord*>> by_topic;
  for (const auto& topic : session.manifest().topics) by_topic[topic];
  for (const auto& r : session.records()) by_topic[r.topic].push_back(&r);

  for (auto& [topic, recs] : by_topic) {
    std::stable_sort(recs.begin(), recs.end(),
                     [](const LogRecord* a, const LogRecord* b) { return a->t < b->t; });
    const auto after = std::lower_bound(recs.begin(), recs.end(), t,
                                        [](const LogRecord* r, Timestamp v) { return r->t < v; });
    const LogRecord* best = nullptr;
    double best_gap = std::numeric_limits<double>::infinity();
    // Candidates: the last record before t and the first at or after it.
    if (after != recs.begin()) {
      const LogRecord* prev = *std::prev(after);
      // Among equal stamps before t, take the earliest in log order.
      const auto first_equal = std::lower_bound(
          recs.begin(), after, prev->t, [](const LogRecord* r, Timestamp v) { return r->t < v; });
      best = *first_equal;
      best_gap = t - best->t;
    }
    if (after != recs.end() && (*after)->t - t < best_gap) {
      best = *after;
      best_gap = (*after)->t - t;
    }
    if (best != nullptr && best_gap <= tolerance) {
      out[topic] = *best;
    } else {
      out[topic] = std::nullopt;
    }
  }
  return out;
}

Replayer::Replayer(bus::Bus& bus, const Session& session, double rate_multiplier, Timestamp start)
    : bus_(bus),
      session_(session),
      rate_(rate_multiplier),
      start_(start),
      node_([&]() -> bus::NodeHandle {
        if (!(rate_multiplier > 0.0) || !std::isfinite(rate_multiplier)) {
          throw InvalidArgument("replay: rate multiplier must be positive");
        }
        return bus.create_node(std::string(kNodeName));
      }()) {
  const auto& recs = session_.records();
  if (!recs.empty()) {
    t_first_ = recs.front().t.sec;
    for (const auto& r : recs) t_first_ = std::min(t_first_, r.t.sec);
    double t_last = t_first_;
    for (const auto& r : recs) t_last = std::max(t_last, r.t.sec);
    summary_.sim_duration = (t_last - t_first_) / rate_;
  }
  for (const auto& r : recs) {
    if (pubs_.find(r.topic) == pubs_.end()) {
      pubs_.emplace(r.topic, bus_.advertise(node_, {r.topic, r.schema, false}));
    }
  }
  summary_.skipped_corrupt = session_.corrupt_lines();
}

Replayer::~Replayer() { bus_.shutdown_node(node_); }

double Replayer::due(const LogRecord& r) const { return start_.sec + (r.t.sec - t_first_) / rate_; }

Timestamp Replayer::end_time() const { return start_ + summary_.sim_duration; }

void Replayer::spin_once(Timestamp now) {
  const auto& recs = session_.records();
  while (next_ < recs.size() && due(recs[next_]) <= now.sec + 1e-9) {
    const LogRecord& r = recs[next_++];
    const auto pub = pubs_.find(r.topic);
    try {
      pub->second.publish(wire::deserialize(r.data, r.schema, r.topic));
      ++summary_.published;
      ++summary_.per_topic[r.topic];
    } catch (const DecodeError& e) {
      ++summary_.skipped_corrupt;
      spdlog::warn("replay: skipping record {} on {}: {}", r.seq, r.topic, e.what());
    } catch (const InvalidArgument& e) {
      ++summary_.skipped_corrupt;
      spdlog::warn("replay: skipping record {} on {}: {}", r.seq, r.topic, e.what());
    }
  }
}

}  // namespace mir::daq
