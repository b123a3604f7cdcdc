// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>

namespace rankarena::log {

enum class Level { Debug, Info, Warn, Error };

/// Serialized stderr sink; concurrent callers never interleave lines.
void write(Level level, std::string_view message);
void set_min_level(Level level);

inline void debug(std::string_view m) { write(Level::Debug, m); }
inline void info(std::string_view m) { write(Level::Info, m); }
inline void warn(std::string_view m) { write(Level::Warn, m); }
inline void error(std::string_view m) { write(Level::Error, m); }

}  // namespace rankarena::log
