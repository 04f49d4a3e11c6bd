/*
 * Copyright 2026 The qsep Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "qsep/csv_util.hpp"

#include <charconv>
#include <cmath>

#include "qsep/common.hpp"

namespace qsep::csv {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

template <typename T>
T parse_number(std::string_view field, std::size_t line, const char* what) {
  T v{};
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  if (!field.empty() && *begin == '+') ++begin;
  const auto res = std::from_chars(begin, end, v);
  if (field.empty() || res.ec != std::errc() || res.ptr != end) {
    throw ParseError("invalid " + std::string(what) + " '" + std::string(field) + "'", line);
  }
  return v;
}

}  // namespace

double parse_double(std::string_view field, std::size_t line) {
  if (field == "inf") return INFINITY;
  return parse_number<double>(field, line, "number");
}

std::int64_t parse_int(std::string_view field, std::size_t line) {
  return parse_number<std::int64_t>(field, line, "integer");
}

std::uint64_t parse_uint(std::string_view field, std::size_t line) {
  return parse_number<std::uint64_t>(field, line, "unsigned integer");
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::map<std::string, std::string> parse_key_values(std::string_view text, char sep,
                                                    std::size_t line) {
  std::map<std::string, std::string> out;
  for (std::string_view pair : split(text, sep)) {
    const std::size_t eq = pair.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected key=value, got '" + std::string(pair) + "'", line);
    }
    out.emplace(std::string(pair.substr(0, eq)), std::string(pair.substr(eq + 1)));
  }
  return out;
}

std::string_view chomp(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace qsep::csv
