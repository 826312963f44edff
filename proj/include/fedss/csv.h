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

#ifndef FEDSS_CSV_H_
#define FEDSS_CSV_H_

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace fedss::csv {

struct Field {
  std::string text;
  int column = 1;  // 1-based character offset within the line
};

struct Row {
  std::vector<Field> fields;
  int line = 1;
};

struct Table {
  std::string file;
  std::vector<std::string> header;
  std::vector<Row> rows;
};

// Comma-delimited, no quoting. Blank lines are skipped; CRLF is tolerated.
// Throws IoError if the file cannot be read, ParseError if the header does not
// match `expected_header` exactly or a row has the wrong number of fields, and
// EmptyTableError when there are no data rows.
Table Read(const std::filesystem::path& path,
           const std::vector<std::string>& expected_header);

// Parses a finite double strictly greater than zero.
double PositiveNumber(const Table& table, const Row& row, std::size_t field);

// Shortest round-trip representation, '.' decimal point.
std::string FormatNumber(double value);

// Writes `header` and rows with ',' separators and '\n' line endings.
class Writer {
 public:
  Writer(std::ostream& out, const std::vector<std::string>& header);

  Writer& operator<<(std::string_view cell);
  Writer& operator<<(double cell);
  Writer& operator<<(long long cell);
  Writer& operator<<(unsigned long long cell);
  Writer& operator<<(std::size_t cell) {
    return *this << static_cast<unsigned long long>(cell);
  }
  Writer& operator<<(int cell) { return *this << static_cast<long long>(cell); }
  void EndRow();

 private:
  void Separator();

  std::ostream& out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

}  // namespace fedss::csv

#endif  // FEDSS_CSV_H_
