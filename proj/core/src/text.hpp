#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace beamsw::detail {

/// Shortest round-trip decimal representation.
inline std::string fmt_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  if (res.ec != std::errc()) return "nan";
  return std::string(buf, res.ptr);
}

/// Fixed-point with `digits` decimals.
inline std::string fmt_fixed(double value, int digits) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, digits);
  if (res.ec != std::errc()) return "nan";
  return std::string(buf, res.ptr);
}

}  // namespace beamsw::detail
