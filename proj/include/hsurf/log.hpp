#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace hsurf {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

/// Level from HSURF_LOG in {error, info, debug}; defaults to error.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("HSURF_LOG");
    if (!env) return LogLevel::Error;
    if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::Info;
    return LogLevel::Error;
  }();
  return level;
}

}  // namespace hsurf

#define HSURF_LOG_AT(level, tag, ...)                          \
  do {                                                         \
    if (static_cast<int>(::hsurf::log_level()) >=              \
        static_cast<int>(::hsurf::LogLevel::level)) {          \
      std::fprintf(stderr, "[" tag "] " __VA_ARGS__);          \
      std::fprintf(stderr, "\n");                              \
    }                                                          \
  } while (0)

#define HSURF_LOG_ERROR(...) HSURF_LOG_AT(Error, "error", __VA_ARGS__)
#define HSURF_LOG_INFO(...) HSURF_LOG_AT(Info, "info", __VA_ARGS__)
#define HSURF_LOG_DEBUG(...) HSURF_LOG_AT(Debug, "debug", __VA_ARGS__)
