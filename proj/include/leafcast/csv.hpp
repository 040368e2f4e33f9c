/* Copyright 2026 The Leafcast Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef LEAFCAST_CSV_HPP_
#define LEAFCAST_CSV_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace leafcast::csv {

struct Row {
  std::size_t line = 0;  // 1-based line number in the source text
  std::vector<std::string> fields;
};

// RFC 4180 reader: quoted fields may hold commas, doubled quotes and newlines.
// Blank lines are skipped. The first row is the header.
class Table {
 public:
  static Table parse(std::string_view text);

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<Row>& rows() const { return rows_; }

  std::optional<std::size_t> find(std::string_view column) const;
  // Like find(), but throws ParseError on line 1 when the column is absent.
  std::size_t require(std::string_view column) const;
  // Throws unless the header is exactly `expected`, in order.
  void expect_header(const std::vector<std::string>& expected) const;

 private:
  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

double parse_double(std::string_view text, std::size_t line, std::string_view column);
long long parse_int(std::string_view text, std::size_t line, std::string_view column);

// Shortest text that parses back to the same double.
std::string format_double(double value);
std::string quote(std::string_view field);
std::string join(const std::vector<std::string>& fields);

}  // namespace leafcast::csv

#endif  // LEAFCAST_CSV_HPP_
