#include "lqgame/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace lqgame {
namespace {

LogLevel read_level() {
  const char* env = std::getenv("LQGAME_LOG");
  if (env == nullptr || std::strcmp(env, "") == 0 || std::strcmp(env, "off") == 0 ||
      std::strcmp(env, "0") == 0) {
    return LogLevel::Off;
  }
  if (std::strcmp(env, "debug") == 0 || std::strcmp(env, "2") == 0) {
    return LogLevel::Debug;
  }
  return LogLevel::Info;
}

}  // namespace

LogLevel log_level() {
  static const LogLevel level = read_level();
  return level;
}

void log_info(const std::string& message) {
  if (log_level() >= LogLevel::Info) {
    std::fprintf(stderr, "[lqgame] %s\n", message.c_str());
  }
}

void log_debug(const std::string& message) {
  if (log_level() >= LogLevel::Debug) {
    std::fprintf(stderr, "[lqgame:debug] %s\n", message.c_str());
  }
}

}  // namespace lqgame
