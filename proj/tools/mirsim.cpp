// mirsim: bringup, replay and inspection entry point.

#include <atomic>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <unistd.h>

#include <CLI11.hpp>

#include "mir/bringup.hpp"
#include "mir/config.hpp"
#include "mir/daq.hpp"
#include "mir/error.hpp"
#include "mir/log.hpp"
#include "mir/simd/kernels.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

int cmd_bringup(const std::string& config_path, const std::string& world, bool record, bool headless,
                double duration, const std::string& joy_script) {
  auto cfg = mir::cli::load_config(config_path);
  if (!world.empty()) cfg.world_file = world;
  if (!joy_script.empty()) cfg.joy_script = joy_script;
  if (duration >= 0.0) cfg.duration = duration;
  cfg.validate();

  mir::cli::SimSession session(cfg, {headless, record});
  if (auto* b = session.bridge()) std::cout << "bridge: ws://127.0.0.1:" << b->port() << "\n";
  std::cout << "simd: " << mir::simd::isa_name(mir::simd::active_isa()) << "\n" << std::flush;

  const auto wall_start = std::chrono::steady_clock::now();
  session.run(g_stop);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();

  const auto& s = session.plant().state();
  std::cout << "sim time " << session.now().sec << " s in " << wall << " s wall\n"
            << "pose x=" << s.x << " y=" << s.y << " heading=" << s.heading << " speed=" << s.speed << "\n"
            << "counts drive=" << session.control_unit().drive_count_master_view()
            << " steer=" << session.control_unit().steer_count() << "\n";
  session.shutdown();
  if (const auto& m = session.final_manifest()) {
    std::cout << "recorded session " << session.config().daq->session_dir().string() << "\n" << m->to_json();
  }
  return 0;
}

int cmd_replay(const std::string& dir, double rate, const std::string& record_to) {
  const auto session = mir::daq::Session::open(dir);
  mir::bus::Bus bus;
  constexpr double kTick = 0.001;
  mir::daq::Replayer replayer(bus, session, rate, {0.0});
  std::unique_ptr<mir::daq::Recorder> recorder;
  if (!record_to.empty()) {
    mir::daq::RecordingConfig rc;
    for (const auto& r : session.records()) {
      if (std::find(rc.topics.begin(), rc.topics.end(), r.topic) == rc.topics.end()) rc.topics.push_back(r.topic);
    }
    const std::filesystem::path out(record_to);
    rc.output_dir = out.parent_path().empty() ? "." : out.parent_path();
    rc.session_name = out.filename().string();
    if (!rc.topics.empty()) recorder = std::make_unique<mir::daq::Recorder>(bus, rc);
  }
  std::uint64_t tick = 0;
  while (!replayer.done() && !g_stop.load()) {
    const mir::Timestamp now{static_cast<double>(tick++) * kTick};
    replayer.spin_once(now);
    if (recorder) recorder->spin_once(now);
  }
  if (recorder) recorder->stop(mir::Timestamp{static_cast<double>(tick) * kTick});

  const auto& sum = replayer.summary();
  std::cout << "replayed " << sum.published << " messages over " << sum.sim_duration
            << " sim s (rate x" << rate << "), skipped " << sum.skipped_corrupt << " corrupt\n";
  for (const auto& [topic, n] : sum.per_topic) std::cout << "  " << topic << ": " << n << "\n";
  return 0;
}

int cmd_inspect(const std::string& dir) {
  const auto session = mir::daq::Session::open(dir);
  std::cout << session.manifest().to_json();
  std::cout << "records: " << session.records().size() << ", corrupt lines: " << session.corrupt_lines() << "\n";
  return 0;
}

int cmd_graph(const std::string& config_path, bool record, bool dot) {
  auto cfg = config_path.empty() ? mir::cli::BringupConfig{} : mir::cli::load_config(config_path);
  std::filesystem::path scratch;
  if (record) {
    scratch = std::filesystem::temp_directory_path() / ("mirsim-graph-" + std::to_string(::getpid()));
    mir::daq::RecordingConfig rc = cfg.daq.value_or(mir::daq::RecordingConfig{});
    if (rc.topics.empty()) rc.topics = mir::cli::default_record_topics();
    rc.output_dir = scratch;
    cfg.daq = rc;
  } else {
    cfg.daq.reset();
  }
  {
    mir::cli::SimSession session(cfg, {true, false});
    const auto g = session.bus().graph();
    std::cout << (dot ? g.to_dot() : g.to_text());
  }
  if (!scratch.empty()) std::filesystem::remove_all(scratch);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  mir::init_logging();
  CLI::App app{"MIR vehicle software twin"};
  app.require_subcommand(1);

  std::string config_path, world, joy_script;
  bool record = false, headless = false;
  double duration = -1.0;
  auto* bringup = app.add_subcommand("bringup", "Run the full simulated vehicle and node graph");
  bringup->add_option("--config", config_path, "YAML configuration file")->required()->check(CLI::ExistingFile);
  bringup->add_option("--world", world, "World file overriding world_file")->check(CLI::ExistingFile);
  bringup->add_flag("--record", record, "Record with data_acquisition");
  bringup->add_flag("--headless", headless, "Do not start the WebSocket bridge");
  bringup->add_option("--duration", duration, "Simulated seconds to run (0 = until interrupted)");
  bringup->add_option("--joy-script", joy_script, "Scripted joystick input")->check(CLI::ExistingFile);

  std::string session_dir, record_to;
  double rate = 1.0;
  auto* replay = app.add_subcommand("replay", "Replay a recorded session onto the bus");
  replay->add_option("session", session_dir, "Session directory")->required();
  replay->add_option("--rate", rate, "Playback rate multiplier")->check(CLI::PositiveNumber);
  replay->add_option("--record", record_to, "Re-record the replayed stream into this session directory");

  auto* inspect = app.add_subcommand("inspect", "Print a session manifest");
  inspect->add_option("session", session_dir, "Session directory")->required();

  bool dot = false;
  std::string graph_config;
  auto* graph = app.add_subcommand("graph", "Print the standard bringup topology");
  graph->add_option("--config", graph_config, "YAML configuration file")->check(CLI::ExistingFile);
  graph->add_flag("--record", record, "Include the data_acquisition node");
  graph->add_flag("--dot", dot, "Graphviz output");

  CLI11_PARSE(app, argc, argv);

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  try {
    if (*bringup) return cmd_bringup(config_path, world, record, headless, duration, joy_script);
    if (*replay) return cmd_replay(session_dir, rate, record_to);
    if (*inspect) return cmd_inspect(session_dir);
    if (*graph) return cmd_graph(graph_config, record, dot);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
