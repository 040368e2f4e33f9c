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

#ifndef LEAFCAST_ERROR_HPP_
#define LEAFCAST_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace leafcast {

// Base for every error raised by the library. The CLI maps the subclasses to
// exit codes: UsageError -> 1, DataError/ParseError -> 2, NumericError -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed input text. `row` is the 1-based line of the source, `column` the
// header name (or empty when the whole line is at fault).
class ParseError : public DataError {
 public:
  ParseError(std::size_t row, std::string column, const std::string& what)
      : DataError(format(row, column, what)), row_(row), column_(std::move(column)) {}

  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  static std::string format(std::size_t row, const std::string& column,
                            const std::string& what) {
    std::string msg = "line " + std::to_string(row);
    if (!column.empty()) msg += ", column '" + column + "'";
    return msg + ": " + what;
  }

  std::size_t row_;
  std::string column_;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace leafcast

#endif  // LEAFCAST_ERROR_HPP_
