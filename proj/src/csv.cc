// Copyright 2026 The fedss Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fedss/csv.h"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fedss/errors.h"

namespace fedss::csv {
namespace {

std::vector<Field> Split(std::string_view line) {
  std::vector<Field> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? line.size() : comma;
    fields.push_back({std::string(line.substr(start, end - start)),
                      static_cast<int>(start) + 1});
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string Join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out;
}

}  // namespace

Table Read(const std::filesystem::path& path,
           const std::vector<std::string>& expected_header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  Table table;
  table.file = path.string();
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = Split(line);
    if (!have_header) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i >= expected_header.size() || fields[i].text != expected_header[i]) {
          throw ParseError(table.file, line_no, fields[i].column,
                           "expected header '" + Join(expected_header) + "'");
        }
        table.header.push_back(fields[i].text);
      }
      if (fields.size() != expected_header.size()) {
        throw ParseError(table.file, line_no, static_cast<int>(line.size()) + 1,
                         "expected header '" + Join(expected_header) + "'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != expected_header.size()) {
      const int column = fields.size() > expected_header.size()
                             ? fields[expected_header.size()].column
                             : static_cast<int>(line.size()) + 1;
      throw ParseError(table.file, line_no, column,
                       "expected " + std::to_string(expected_header.size()) +
                           " fields, found " + std::to_string(fields.size()));
    }
    table.rows.push_back({std::move(fields), line_no});
  }
  if (!have_header) {
    throw ParseError(table.file, 1, 1,
                     "missing header '" + Join(expected_header) + "'");
  }
  if (table.rows.empty()) throw EmptyTableError(table.file);
  return table;
}

double PositiveNumber(const Table& table, const Row& row, std::size_t field) {
  const Field& f = row.fields.at(field);
  double value = 0.0;
  const char* first = f.text.data();
  const char* last = first + f.text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || f.text.empty()) {
    throw ParseError(table.file, row.line, f.column,
                     "'" + f.text + "' is not a number");
  }
  if (!std::isfinite(value) || value <= 0.0) {
    throw ParseError(table.file, row.line, f.column,
                     "'" + f.text + "' must be a positive finite number");
  }
  return value;
}

std::string FormatNumber(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

Writer::Writer(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  out_ << Join(header) << '\n';
}

void Writer::Separator() {
  if (in_row_++ > 0) out_ << ',';
}

Writer& Writer::operator<<(std::string_view cell) {
  Separator();
  out_ << cell;
  return *this;
}

Writer& Writer::operator<<(double cell) {
  Separator();
  out_ << FormatNumber(cell);
  return *this;
}

Writer& Writer::operator<<(long long cell) {
  Separator();
  out_ << cell;
  return *this;
}

Writer& Writer::operator<<(unsigned long long cell) {
  Separator();
  out_ << cell;
  return *this;
}

void Writer::EndRow() {
  while (in_row_ < columns_) Separator();
  out_ << '\n';
  in_row_ = 0;
}

}  // namespace fedss::csv
