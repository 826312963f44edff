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

#ifndef FEDSS_ERRORS_H_
#define FEDSS_ERRORS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace fedss {

// Machine-readable failure categories. The CLI maps each to its own exit code.
enum class ErrorCategory {
  kConfig,      // invalid parameters or conflicting options
  kParse,       // malformed input file
  kEmptyInput,  // structurally valid input with no usable rows
  kIo,          // file could not be opened or written
  kRound,       // a client failed during a training round
};

std::string_view CategoryName(ErrorCategory category);
int ExitCode(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorCategory::kConfig, message) {}
};

// Carries the location of the offending cell. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::string file, int line, int column, const std::string& what);

  const std::string& file() const { return file_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string file_;
  int line_;
  int column_;
};

class EmptyTableError : public Error {
 public:
  explicit EmptyTableError(const std::string& file)
      : Error(ErrorCategory::kEmptyInput, "table has no data rows: " + file) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message)
      : Error(ErrorCategory::kIo, message) {}
};

class RoundFailure : public Error {
 public:
  RoundFailure(unsigned client, const std::string& what)
      : Error(ErrorCategory::kRound,
              "client " + std::to_string(client) + " failed: " + what),
        client_(client) {}

  unsigned client() const { return client_; }

 private:
  unsigned client_;
};

}  // namespace fedss

#endif  // FEDSS_ERRORS_H_
