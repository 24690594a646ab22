#include "svsp/log.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <mutex>

namespace svsp::app {

namespace {

std::atomic<wire::LogLevel> g_level{wire::LogLevel::Info};
std::mutex g_mutex;

}  // namespace

void set_log_level(wire::LogLevel level) { g_level.store(level); }

wire::LogLevel log_level() { return g_level.load(); }

std::optional<wire::LogLevel> parse_log_level(std::string_view name) {
  if (name == "debug") return wire::LogLevel::Debug;
  if (name == "info") return wire::LogLevel::Info;
  if (name == "warn") return wire::LogLevel::Warn;
  return std::nullopt;
}

const char* log_level_name(wire::LogLevel level) {
  switch (level) {
    case wire::LogLevel::Debug: return "debug";
    case wire::LogLevel::Info: return "info";
    case wire::LogLevel::Warn: return "warn";
  }
  return "unknown";
}

void log_line(wire::LogLevel level, std::string_view text) {
  if (static_cast<int>(level) < static_cast<int>(g_level.load())) return;
  auto now = std::chrono::system_clock::now();
  std::time_t secs = std::chrono::system_clock::to_time_t(now);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                now.time_since_epoch()) .count() % 1000;
  std::tm tm_utc;
  gmtime_r(&secs, &tm_utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%S", &tm_utc);

  std::lock_guard<std::mutex> lock(g_mutex);
  std::fprintf(stderr, "%s.%03dZ %-5s %.*s\n", stamp, static_cast<int>(ms),
               log_level_name(level), static_cast<int>(text.size()),
               text.data());
}

}  // namespace svsp::app
