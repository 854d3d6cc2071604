#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace anncalc {

// Shortest decimal string that round-trips the double exactly; keeps CSV
// output byte-stable across runs and loadable without precision loss.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string format_int(long long v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace anncalc
