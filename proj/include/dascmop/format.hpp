#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <system_error>

namespace dascmop {

/// Shortest decimal text that parses back to the same double.
inline std::string format_shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return std::to_string(v);
  return std::string(buf, ptr);
}

/// Scientific notation with a three-digit mantissa, e.g. 1.367E-01.
inline std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3E", v);
  return buf;
}

}  // namespace dascmop
