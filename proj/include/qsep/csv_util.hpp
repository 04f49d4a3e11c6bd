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

// Small helpers shared by the CSV readers and writers.

#ifndef QSEP_CSV_UTIL_HPP_
#define QSEP_CSV_UTIL_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qsep::csv {

// Shortest decimal that parses back to the same double.
std::string format_double(double v);

// Whole-field parses; throw ParseError tagged with `line` on failure.
double parse_double(std::string_view field, std::size_t line);
std::int64_t parse_int(std::string_view field, std::size_t line);
std::uint64_t parse_uint(std::string_view field, std::size_t line);

std::vector<std::string_view> split(std::string_view line, char sep = ',');

// Parses "key=value[,key=value...]" as found after a leading "# ".
// Throws ParseError on a pair without '='.
std::map<std::string, std::string> parse_key_values(std::string_view text, char sep,
                                                    std::size_t line);

// Strips a trailing '\r' left by CRLF files.
std::string_view chomp(std::string_view line);

}  // namespace qsep::csv

#endif  // QSEP_CSV_UTIL_HPP_
