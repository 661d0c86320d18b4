#pragma once

#include <fmt/core.h>

#include <string_view>

namespace ragdepth::log {

enum class Level { Quiet = 0, Info = 1, Debug = 2 };

void set_level(Level level);
Level level();
void write(std::string_view tag, std::string_view message);

template <typename... Args>
void info(fmt::format_string<Args...> f, Args&&... args) {
  if (level() >= Level::Info) write("info", fmt::format(f, std::forward<Args>(args)...));
}

template <typename... Args>
void debug(fmt::format_string<Args...> f, Args&&... args) {
  if (level() >= Level::Debug) write("debug", fmt::format(f, std::forward<Args>(args)...));
}

// The next two are shown at every level.
template <typename... Args>
void note(fmt::format_string<Args...> f, Args&&... args) {
  write("info", fmt::format(f, std::forward<Args>(args)...));
}

template <typename... Args>
void error(fmt::format_string<Args...> f, Args&&... args) {
  write("error", fmt::format(f, std::forward<Args>(args)...));
}

}  // namespace ragdepth::log
