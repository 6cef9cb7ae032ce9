#pragma once

#include <cstdio>
#include <string>

namespace tfgrpo {

/// Shortest-exact decimal rendering of a double; stable across runs.
inline std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace tfgrpo
