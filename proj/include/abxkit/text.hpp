// abxkit/text.hpp

// Copyright 2026 The abxkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Locale-independent text helpers shared by every reader and writer:
// strict number parsing, shortest round-trip formatting, line splitting,
// and a minimal comma-separated table reader (no quoting).

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "abxkit/error.hpp"

namespace abxkit {

/// Parses a finite decimal or scientific-notation real. Rejects "inf",
/// "nan", hex floats, embedded whitespace and trailing garbage.
inline std::optional<double> parse_real(std::string_view s) {
  if (s.empty()) return std::nullopt;
  for (char c : s) {
    bool ok = (c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.' ||
              c == 'e' || c == 'E';
    if (!ok) return std::nullopt;
  }
  if (s.front() == '+') {
    s.remove_prefix(1);
    if (s.empty() || s.front() == '-' || s.front() == '+') return std::nullopt;
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value,
                                   std::chars_format::general);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

inline std::optional<std::int64_t> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

/// Shortest representation that reads back to the identical double.
inline std::string format_real(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw DomainError("cannot format real");
  return std::string(buf, ptr);
}

inline std::string format_fixed(double value, int decimals) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::fixed, decimals);
  if (ec != std::errc()) throw DomainError("cannot format real");
  return std::string(buf, ptr);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    std::size_t end = s.find(sep, begin);
    if (end == std::string_view::npos) {
      out.push_back(s.substr(begin));
      return out;
    }
    out.push_back(s.substr(begin, end - begin));
    begin = end + 1;
  }
}

/// Splits on runs of single spaces; an empty field (double space, leading
/// or trailing space) is reported as an empty view so callers can reject it.
inline std::vector<std::string_view> split_fields(std::string_view s) {
  return split(s, ' ');
}

struct Line {
  std::size_t number;  // 1-based
  std::string_view text;
};

/// Splits LF-terminated text into lines. A final empty segment produced by
/// a trailing newline is dropped.
inline std::vector<Line> split_lines(std::string_view content) {
  std::vector<Line> lines;
  std::size_t number = 1, begin = 0;
  while (begin < content.size()) {
    std::size_t end = content.find('\n', begin);
    if (end == std::string_view::npos) end = content.size();
    lines.push_back({number++, content.substr(begin, end - begin)});
    begin = end + 1;
  }
  return lines;
}

inline std::string_view trim_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

inline std::string join(std::span<const std::string> parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

struct CsvRow {
  std::size_t line;
  std::vector<std::string_view> fields;
};

/// Reads a header-bearing comma-separated table. Leading '#' lines and
/// blank lines are skipped; the header must match `columns` exactly and
/// every row must have the header's arity. Views point into `content`.
inline std::vector<CsvRow> read_csv(std::string_view content,
                                    std::span<const std::string_view> columns) {
  std::vector<CsvRow> rows;
  bool have_header = false;
  for (const Line& line : split_lines(content)) {
    std::string_view text = trim_cr(line.text);
    if (text.empty() || text.front() == '#') continue;
    auto fields = split(text, ',');
    if (!have_header) {
      bool match = fields.size() == columns.size();
      for (std::size_t i = 0; match && i < fields.size(); ++i)
        match = fields[i] == columns[i];
      if (!match) {
        std::string expected;
        for (std::size_t i = 0; i < columns.size(); ++i) {
          if (i) expected += ',';
          expected += columns[i];
        }
        throw ParseError(line.number, "bad header, expected '" + expected + "'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != columns.size())
      throw ParseError(line.number, "expected " + std::to_string(columns.size()) +
                                        " fields, found " +
                                        std::to_string(fields.size()));
    rows.push_back({line.number, std::move(fields)});
  }
  if (!have_header) throw ParseError(0, "missing header row");
  return rows;
}

inline std::string csv_header(std::span<const std::string_view> columns) {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += columns[i];
  }
  out += '\n';
  return out;
}

/// Identifiers and labels written into comma-separated tables must not
/// break the table structure.
inline bool is_plain_token(std::string_view s) {
  if (s.empty() || s.front() == '#') return false;
  for (char c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == ' ' || c == '\t') return false;
  return true;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return std::move(ss).str();
}

}  // namespace abxkit
