#pragma once

#include <charconv>
#include <string>

namespace superkrylov {

// Shortest round-trip representation; identical bytes on every run.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace superkrylov
