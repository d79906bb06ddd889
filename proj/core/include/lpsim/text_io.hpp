#ifndef LPSIM_TEXT_IO_HPP
#define LPSIM_TEXT_IO_HPP

#include <charconv>
#include <string>
#include <string_view>

#include "lpsim/error.hpp"

namespace lpsim {

// Shortest decimal form that round-trips the exact double. All persisted
// numeric data goes through this so re-reading a file reproduces bit-equal
// values.
inline void append_double(std::string& out, double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

inline std::string format_double(double v) {
  std::string s;
  append_double(s, v);
  return s;
}

inline double parse_double(std::string_view tok, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw FormatError(std::string(what) + ": not a number: '" + std::string(tok) + "'");
  }
  return v;
}

inline long long parse_int(std::string_view tok, std::string_view what) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw FormatError(std::string(what) + ": not an integer: '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace lpsim

#endif
