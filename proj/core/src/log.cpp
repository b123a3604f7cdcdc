// SPDX-License-Identifier: Apache-2.0
#include "rankarena/log.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>
#include <string>

namespace rankarena::log {
namespace {

std::mutex g_sink_mutex;
std::atomic<Level> g_min_level{Level::Info};

const char* label(Level level) {
  switch (level) {
    case Level::Debug: return "debug";
    case Level::Info: return "info";
    case Level::Warn: return "warn";
    case Level::Error: return "error";
  }
  return "?";
}

}  // namespace

void set_min_level(Level level) { g_min_level.store(level); }

void write(Level level, std::string_view message) {
  if (level < g_min_level.load()) return;
  std::string line = "[rankarena ";
  line += label(level);
  line += "] ";
  line += message;
  line += '\n';
  std::lock_guard lock(g_sink_mutex);
  std::fwrite(line.data(), 1, line.size(), stderr);
  std::fflush(stderr);
}

}  // namespace rankarena::log
