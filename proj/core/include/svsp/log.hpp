#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "svsp/session_common.hpp"

namespace svsp::app {

// Process-wide minimum level for stderr diagnostics; machine output on
// stdout is never routed through here.
void set_log_level(wire::LogLevel level);
wire::LogLevel log_level();

std::optional<wire::LogLevel> parse_log_level(std::string_view name);
const char* log_level_name(wire::LogLevel level);

// One structured line to stderr: "<iso8601> <level> <text>".
void log_line(wire::LogLevel level, std::string_view text);

}  // namespace svsp::app
