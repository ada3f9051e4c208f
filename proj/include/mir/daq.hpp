#pragma once

// Data acquisition: topic recording to JSON Lines, nearest-stamp alignment of
// recorded topics, and replay of a recorded session onto the bus.
//
// A session is a directory holding
//   log.jsonl      one record per line:
//                  {"t":float,"topic":str,"seq":int,"schema":int,"data":base64}
//   manifest.json  {"session","topics","counts","t_start","t_end","truncated","dropped"}

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mir/bus.hpp"
#include "mir/msgs.hpp"
#include "mir/serialization.hpp"

namespace mir::daq {

std::string base64_encode(std::span<const std::uint8_t> bytes);
// Throws DecodeError on malformed input.
wire::Bytes base64_decode(std::string_view text);

struct RecordingConfig {
  std::vector<std::string> topics;
  std::filesystem::path output_dir = "sessions";
  std::string session_name = "session";
  double flush_interval = 1.0;  // s of simulation time

  void validate() const;
  std::filesystem::path session_dir() const { return output_dir / session_name; }
};

struct LogRecord {
  Timestamp t;
  std::string topic;
  std::uint32_t seq = 0;
  msgs::SchemaId schema = msgs::SchemaId::kVehicleControl;
  wire::Bytes data;

  bool operator==(const LogRecord&) const = default;
};

std::string to_jsonl(const LogRecord& r);
// Throws DecodeError when the line is not a well-formed record.
LogRecord parse_jsonl(std::string_view line);

struct Manifest {
  std::string session;
  std::vector<std::string> topics;
  std::map<std::string, std::uint64_t> counts;
  double t_start = 0.0;
  double t_end = 0.0;
  bool truncated = false;
  std::uint64_t dropped = 0;

  std::string to_json() const;
  static Manifest from_json(std::string_view text);
};

inline std::filesystem::path log_path(const std::filesystem::path& session_dir) {
  return session_dir / "log.jsonl";
}
inline std::filesystem::path manifest_path(const std::filesystem::path& session_dir) {
  return session_dir / "manifest.json";
}

// The data_acquisition node. Construction starts the recording.
class Recorder {
 public:
  static constexpr std::string_view kNodeName = "data_acquisition";

  // Throws ConfigError for an empty or unknown topic list and IoError when
  // the session directory or log cannot be created.
  Recorder(bus::Bus& bus, RecordingConfig cfg, Timestamp now = {});
  ~Recorder();
  Recorder(const Recorder&) = delete;
  Recorder& operator=(const Recorder&) = delete;

  // Writes everything received since the last call, in publish order, and
  // flushes when flush_interval has elapsed.
  void spin_once(Timestamp now);

  // Flushes, writes the manifest and leaves the bus. Idempotent.
  const Manifest& stop(Timestamp now);

  bool recording() const { return recording_; }
  const std::filesystem::path& session_dir() const { return dir_; }
  const Manifest& manifest() const { return manifest_; }

 private:
  void write(const bus::Envelope& env);
  void check_stream();

  bus::Bus& bus_;
  RecordingConfig cfg_;
  std::filesystem::path dir_;
  bus::NodeHandle node_;
  std::vector<bus::Subscription> subs_;
  std::ofstream out_;
  Manifest manifest_;
  std::map<std::string, double> last_t_;
  double last_flush_ = 0.0;
  bool recording_ = true;
  bool stopped_ = false;
  bool any_record_ = false;
};

// A recorded session loaded from disk.
class Session {
 public:
  // Throws IoError when the directory has no readable log or manifest.
  static Session open(const std::filesystem::path& dir);

  const Manifest& manifest() const { return manifest_; }
  const std::vector<LogRecord>& records() const { return records_; }
  // Records of one topic in log order.
  std::vector<const LogRecord*> topic_records(std::string_view topic) const;
  std::uint64_t corrupt_lines() const { return corrupt_lines_; }

 private:
  Manifest manifest_;
  std::vector<LogRecord> records_;
  std::uint64_t corrupt_lines_ = 0;
};

// For every recorded topic, the record whose stamp is nearest to t when it
// lies within `tolerance`; equidistant candidates resolve to the earlier one.
std::map<std::string, std::optional<LogRecord>> align(const Session& session, Timestamp t,
                                                      double tolerance);

struct ReplaySummary {
  std::uint64_t published = 0;
  std::uint64_t skipped_corrupt = 0;
  double sim_duration = 0.0;  // scaled span between first and last record
  std::map<std::string, std::uint64_t> per_topic;
};

// Republishes a session on its original topics. Record i is due at
// start + (t_i - t_first) / rate_multiplier on the simulation clock.
class Replayer {
 public:
  static constexpr std::string_view kNodeName = "replay";

  Replayer(bus::Bus& bus, const Session& session, double rate_multiplier, Timestamp start);
  ~Replayer();
  Replayer(const Replayer&) = delete;
  Replayer& operator=(const Replayer&) = delete;

  void spin_once(Timestamp now);
  bool done() const { return next_ >= session_.records().size(); }
  // Simulation time at which the last record becomes due.
  Timestamp end_time() const;
  const ReplaySummary& summary() const { return summary_; }

 private:
  double due(const LogRecord& r) const;

  bus::Bus& bus_;
  const Session& session_;
  double rate_;
  Timestamp start_;
  double t_first_ = 0.0;
  bus::NodeHandle node_;
  std::map<std::string, bus::Publisher, std::less<>> pubs_;
  std::size_t next_ = 0;
  ReplaySummary summary_;
};

}  // namespace mir::daq
