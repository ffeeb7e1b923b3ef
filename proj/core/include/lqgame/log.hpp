#pragma once

#include <string>

namespace lqgame {

// Verbosity is read once from the LQGAME_LOG environment variable:
// unset/"off" silences, "info" and "debug" enable the matching levels.
enum class LogLevel { Off = 0, Info = 1, Debug = 2 };

LogLevel log_level();
void log_info(const std::string& message);
void log_debug(const std::string& message);

}  // namespace lqgame
