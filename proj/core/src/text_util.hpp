#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace esim::detail {

/// Shortest decimal string that round-trips the value; "inf" for infinity.
/// Keeps output files byte-stable across runs and platforms.
inline std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace esim::detail
