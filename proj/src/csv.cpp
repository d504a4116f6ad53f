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

#include "puncture/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace puncture::csv {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Splits one record; quoted fields may contain commas, doubled quotes and newlines.
bool read_record(std::istream& is, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool quoted = false, any = false;
  char c;
  while (is.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (is.peek() == '"') {
          is.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw SchemaError("unterminated quoted field");
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

}  // namespace

std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return quote(std::get<std::string>(c));
}

Writer::Writer(std::ostream& os, std::string schema, std::vector<std::string> header)
    : os_(os), columns_(header.size()) {
  if (schema.empty() || schema.find_first_of("/\n,") != std::string::npos)
    throw ContractViolation("schema names must be non-empty and contain no '/', ',' or newline");
  os_ << "# schema=" << schema << "/v" << schema_version << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << quote(header[i]);
  os_ << '\n';
}

void Writer::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_) throw ContractViolation("row width differs from the header");
  for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << format_cell(cells[i]);
  os_ << '\n';
  ++rows_;
}

std::size_t Table::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw SchemaError("no column named '" + name + "' in schema " + schema);
}

double parse_double(const std::string& s) {
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  if (s == "nan") return NAN;
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (s.empty() || end != begin + s.size()) throw SchemaError("not a number: '" + s + "'");
  return v;
}

std::vector<double> Table::numeric_column(const std::string& name) const {
  const std::size_t j = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(parse_double(r[j]));
  return out;
}

std::vector<std::string> Table::text_column(const std::string& name) const {
  const std::size_t j = column_index(name);
  std::vector<std::string> out;
  for (const auto& r : rows) out.push_back(r[j]);
  return out;
}

Table read(std::istream& is, const std::string& expected_schema) {
  Table t;
  std::string line;
  if (!std::getline(is, line)) throw SchemaError("empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::string prefix = "# schema=";
  const auto slash = line.rfind("/v");
  if (line.rfind(prefix, 0) != 0 || slash == std::string::npos || slash < prefix.size())
    throw SchemaError("missing '# schema=<name>/v<version>' line");
  t.schema = line.substr(prefix.size(), slash - prefix.size());
  try {
    std::size_t used = 0;
    t.version = std::stoi(line.substr(slash + 2), &used);
    if (slash + 2 + used != line.size()) throw SchemaError("bad schema version");
  } catch (const std::logic_error&) {
    throw SchemaError("bad schema version in '" + line + "'");
  }
  if (!expected_schema.empty() && t.schema != expected_schema)
    throw SchemaError("schema mismatch: expected " + expected_schema + ", found " + t.schema);
  if (t.version != schema_version)
    throw SchemaError("schema version mismatch: expected v" + std::to_string(schema_version) + ", found v" +
                      std::to_string(t.version));
  if (!read_record(is, t.header)) throw SchemaError("missing header row");
  std::vector<std::string> fields;
  while (read_record(is, fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != t.header.size()) throw SchemaError("row width differs from the header");
    t.rows.push_back(fields);
  }
  return t;
}

Table read_string(const std::string& text, const std::string& expected_schema) {
  std::istringstream is(text);
  return read(is, expected_schema);
}

}  // namespace puncture::csv
