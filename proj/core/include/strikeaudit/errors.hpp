// Copyright 2026 The StrikeAudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef STRIKEAUDIT_ERRORS_HPP_
#define STRIKEAUDIT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace strikeaudit {

// Base for every data or contract failure raised by the library. Callers
// that only need to distinguish "bad input" from programming errors can
// catch this type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input file is missing a required column or otherwise violates its schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A cell could not be parsed. Carries the 1-based data row and column name.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::string column, const std::string& what)
      : Error("row " + std::to_string(row) + ", column '" + column +
              "': " + what),
        row_(row),
        column_(std::move(column)) {}

  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

// Not enough usable data for the requested operation.
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

// A stratum or fold lacks the rows or classes stratification requires.
class StratificationError : public Error {
 public:
  using Error::Error;
};

// The information matrix of a logistic fit is singular.
class CollinearityError : public Error {
 public:
  using Error::Error;
};

// Caller broke an operation's documented precondition (e.g. passed race
// columns to the tree trainer).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// The statistic is undefined for the given labels (e.g. AUC of one class).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

// Bad argument value. Kept distinct from Error so argument misuse can be
// reported as a usage problem.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace strikeaudit

#endif  // STRIKEAUDIT_ERRORS_HPP_
