#pragma once

#include <cstdio>
#include <string>

namespace lammos {

/// printf-style %.*g; the CSV exports use 9 significant digits.
inline std::string format_g(double value, int significant_digits = 9) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant_digits, value);
  return buf;
}

}  // namespace lammos
