#include "mir/log.hpp"

#include <cstdlib>
#include <string_view>

namespace mir {

void init_logging() {
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("MIR_LOG_LEVEL")) {
    const std::string_view v(env);
    if (v == "error") level = spdlog::level::err;
    else if (v == "warn") level = spdlog::level::warn;
    else if (v == "info") level = spdlog::level::info;
    else if (v == "debug") level = spdlog::level::debug;
  }
  spdlog::set_level(level);
}

}  // namespace mir
