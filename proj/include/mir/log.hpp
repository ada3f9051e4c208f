#pragma once

#include <spdlog/spdlog.h>

namespace mir {

// Applies MIR_LOG_LEVEL (error, warn, info, debug) to the default logger.
// Unset or unrecognized values leave the level at warn.
void init_logging();

}  // namespace mir
