/*
 * Copyright 2026 The puncture authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "puncture/common.hpp"

// Versioned CSV: a "# schema=<name>/v<version>" line, a header row, then data.
namespace puncture::csv {

inline constexpr int schema_version = 1;

class SchemaError : public DomainError {
 public:
  using DomainError::DomainError;
};

using Cell = std::variant<double, std::int64_t, std::string>;

// %.17g, which round-trips every finite double; inf and nan are spelled out.
std::string format_double(double v);
std::string format_cell(const Cell& c);

class Writer {
 public:
  Writer(std::ostream& os, std::string schema, std::vector<std::string> header);
  void row(const std::vector<Cell>& cells);
  std::size_t rows_written() const { return rows_; }

 private:
  std::ostream& os_;
  std::size_t columns_;
  std::size_t rows_ = 0;
};

struct Table {
  std::string schema;
  int version = 0;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column_index(const std::string& name) const;
  std::vector<double> numeric_column(const std::string& name) const;
  std::vector<std::string> text_column(const std::string& name) const;
};

// Throws SchemaError on a missing schema line, a schema or version mismatch,
// or a row whose width differs from the header.
Table read(std::istream& is, const std::string& expected_schema = {});
Table read_string(const std::string& text, const std::string& expected_schema = {});

double parse_double(const std::string& s);

}  // namespace puncture::csv
