#pragma once

#include <cstdio>
#include <string>

namespace choquard::detail {

// Locale-independent %.17g.
inline std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace choquard::detail
