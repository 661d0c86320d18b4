#include "ragdepth/log.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>

namespace ragdepth::log {

namespace {
std::atomic<Level> g_level{Level::Info};
std::mutex g_mutex;
}  // namespace

void set_level(Level level) { g_level.store(level); }
Level level() { return g_level.load(); }

void write(std::string_view tag, std::string_view message) {
  std::lock_guard lock(g_mutex);
  fmt::print(stderr, "[{}] {}\n", tag, message);
}

}  // namespace ragdepth::log
