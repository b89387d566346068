#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace erw {

/// Shortest decimal string that parses back to exactly `x`.
inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

/// 0x-prefixed lowercase hex, as accepted back by the CLI seed parser.
inline std::string format_seed(std::uint64_t seed) {
  char buf[32] = {'0', 'x'};
  auto res = std::to_chars(buf + 2, buf + sizeof(buf), seed, 16);
  return std::string(buf, res.ptr);
}

}  // namespace erw
