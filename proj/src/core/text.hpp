#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dyad {

// Shortest decimal form that round-trips the exact double. All file formats
// emit numbers through this so that load->save is byte-stable.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline bool parse_double(std::string_view s, double& out) {
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline bool parse_u64(std::string_view s, uint64_t& out) {
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

// Fixed two decimals, half-up, printed via integer hundredths so that e.g.
// 100*7/24 always renders as "29.17". Values are non-negative percentages.
inline std::string format_fixed2(double v) {
  long long cents = static_cast<long long>(std::floor(v * 100.0 + 0.5));
  std::string frac = std::to_string(cents % 100);
  if (frac.size() < 2) frac.insert(frac.begin(), '0');
  return std::to_string(cents / 100) + "." + frac;
}

inline std::vector<std::string_view> split_on(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace dyad
