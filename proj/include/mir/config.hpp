#pragma once

// Bringup configuration, loaded from a YAML file. Absent keys keep their
// defaults; unknown keys are rejected so typos surface immediately.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>

#include "mir/byte_pipe.hpp"
#include "mir/daq.hpp"
#include "mir/firmware.hpp"
#include "mir/plant.hpp"
#include "mir/teleop.hpp"

namespace mir::cli {

struct BringupConfig {
  plant::PlantConfig plant;
  teleop::TeleopConfig teleop;
  firmware::ControlUnitConfig firmware;
  wire::LinkConfig link;
  std::optional<daq::RecordingConfig> daq;
  std::optional<std::filesystem::path> world_file;
  std::optional<std::filesystem::path> joy_script;
  std::uint16_t bridge_port = 9090;
  bool realtime = false;
  std::uint64_t seed = 0;
  double duration = 0.0;          // simulated seconds; 0 runs until interrupted
  std::uint16_t queue_depth = 10; // default subscriber queue depth

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Relative world_file / joy_script paths resolve against `base_dir`.
// Throws ConfigError with a line number for syntax errors, unknown keys and
// values of the wrong type.
BringupConfig parse_config(std::string_view yaml, const std::filesystem::path& base_dir = {});
BringupConfig load_config(const std::filesystem::path& path);

// Topics recorded when recording is requested without a daq section.
std::vector<std::string> default_record_topics();

}  // namespace mir::cli
