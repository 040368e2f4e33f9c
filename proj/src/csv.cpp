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

#include "leafcast/csv.hpp"

#include <charconv>
#include <cmath>

#include "leafcast/error.hpp"

namespace leafcast::csv {

Table Table::parse(std::string_view text) {
  Table table;
  std::vector<Row> rows;
  Row current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    const bool blank = current.fields.size() == 1 && current.fields[0].empty();
    if (!blank) rows.push_back(std::move(current));
    current = Row{};
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started) throw ParseError(line, "", "stray quote inside unquoted field");
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        current.line = ++line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw ParseError(line, "", "unterminated quoted field");
  if (field_started || !current.fields.empty() || !field.empty()) end_row();

  if (rows.empty()) throw ParseError(1, "", "empty input, expected a header row");
  table.header_ = std::move(rows.front().fields);
  rows.erase(rows.begin());
  for (const Row& row : rows) {
    if (row.fields.size() != table.header_.size()) {
      throw ParseError(row.line, "",
                       "expected " + std::to_string(table.header_.size()) +
                           " fields, found " + std::to_string(row.fields.size()));
    }
  }
  table.rows_ = std::move(rows);
  return table;
}

std::optional<std::size_t> Table::find(std::string_view column) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == column) return i;
  }
  return std::nullopt;
}

std::size_t Table::require(std::string_view column) const {
  if (auto idx = find(column)) return *idx;
  throw ParseError(1, std::string(column), "missing required column");
}

void Table::expect_header(const std::vector<std::string>& expected) const {
  if (header_ != expected) {
    throw ParseError(1, "", "unexpected header '" + join(header_) + "', expected '" +
                                join(expected) + "'");
  }
}

double parse_double(std::string_view text, std::size_t line, std::string_view column) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last) {
    throw ParseError(line, std::string(column), "not a number: '" + std::string(text) + "'");
  }
  return value;
}

long long parse_int(std::string_view text, std::size_t line, std::string_view column) {
  long long value = 0;
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), last, value);
  if (text.empty() || ec != std::errc() || ptr != last) {
    throw ParseError(line, std::string(column), "not an integer: '" + std::string(text) + "'");
  }
  return value;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += quote(fields[i]);
  }
  return out;
}

}  // namespace leafcast::csv
