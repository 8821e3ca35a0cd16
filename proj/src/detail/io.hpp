#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "playful/error.hpp"

namespace playful::detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write file: " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Calls fn(line_no, text) for every line that is not blank or a '#' comment.
// Trailing '\r' is stripped so CRLF files load.
inline void for_each_line(std::string_view doc,
                          const std::function<void(std::size_t, std::string_view)>& fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= doc.size()) {
    auto end = doc.find('\n', start);
    if (end == std::string_view::npos) end = doc.size();
    std::string_view line = doc.substr(start, end - start);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!trim(line).empty() && trim(line).front() != '#') fn(line_no, line);
    if (end == doc.size()) break;
    start = end + 1;
  }
}

// Tab-separated variant of for_each_line; fields are trimmed.
inline void for_each_record(std::string_view doc,
                            const std::function<void(std::size_t, const std::vector<std::string>&)>& fn) {
  for_each_line(doc, [&](std::size_t line_no, std::string_view line) {
    auto fields = split(line, '\t');
    for (auto& f : fields) f = std::string(trim(f));
    fn(line_no, fields);
  });
}

inline double parse_double(std::string_view s, std::size_t line_no = 0) {
  s = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("not a number: '" + std::string(s) + "'", line_no);
  return v;
}

inline long long parse_int(std::string_view s, std::size_t line_no = 0) {
  s = trim(s);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("not an integer: '" + std::string(s) + "'", line_no);
  return v;
}

}  // namespace playful::detail
