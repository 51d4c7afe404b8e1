#pragma once

#include <charconv>
#include <string>

namespace fsrl {

// Shortest round-trip decimal form; the one formatting used by every CSV
// writer so artifacts are reproducible byte for byte.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace fsrl
