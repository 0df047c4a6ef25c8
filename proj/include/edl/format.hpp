#pragma once

#include <array>
#include <charconv>
#include <cstdio>
#include <string>
#include <system_error>

namespace edl {

/// Shortest decimal representation that parses back to the same double.
inline std::string format_roundtrip(double v)
{
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), end);
}

/// printf-style "%.<digits>g".
inline std::string format_significant(double v, int digits)
{
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.*g", digits, v);
  return std::string(buf.data());
}

}  // namespace edl
