#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vodfog/error.hpp"

namespace vodfog {

// Integer variables within this distance of an integer are accepted as integral.
inline constexpr double kIntegralityTol = 1e-6;
// Absolute slack (Gbps or kWh) allowed by feasibility checks.
inline constexpr double kFeasibilityTol = 1e-6;
// Loads below this are treated as zero when counting equipment.
inline constexpr double kZeroLoad = 1e-7;

inline constexpr int kHoursPerDay = 24;

// Number of `unit`-sized devices needed to carry `load`: ceil(load / unit),
// forgiving floating-point noise at exact step boundaries.
inline std::int64_t step_count(double load, double unit) {
  if (load <= kZeroLoad) return 0;
  return static_cast<std::int64_t>(std::ceil(load / unit - kIntegralityTol));
}

inline bool within_capacity(double load, double capacity) {
  return load <= capacity + kFeasibilityTol * std::max(1.0, std::abs(capacity));
}

inline bool rel_equal(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

namespace text {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::string_view strip_comment(std::string_view s) {
  const auto hash = s.find('#');
  return hash == std::string_view::npos ? s : s.substr(0, hash);
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::vector<std::string> lines(std::string_view doc) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= doc.size()) {
    const auto pos = doc.find('\n', start);
    if (pos == std::string_view::npos) {
      if (start < doc.size()) out.emplace_back(doc.substr(start));
      break;
    }
    out.emplace_back(doc.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

// Strict full-token number parse; returns false on any trailing garbage.
inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

inline bool parse_int(std::string_view s, long long& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

inline double require_double(std::string_view s, const std::string& what, int line) {
  double v = 0;
  if (!parse_double(s, v)) throw ParseError("bad number '" + std::string(s) + "' for " + what, line);
  return v;
}

// Shortest decimal text that reads back to exactly `v`.
inline std::string format_exact(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace text
}  // namespace vodfog
