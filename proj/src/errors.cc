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

#include "fedss/errors.h"

namespace fedss {

std::string_view CategoryName(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kConfig: return "config";
    case ErrorCategory::kParse: return "parse";
    case ErrorCategory::kEmptyInput: return "empty_input";
    case ErrorCategory::kIo: return "io";
    case ErrorCategory::kRound: return "round";
  }
  return "unknown";
}

int ExitCode(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kConfig: return 2;
    case ErrorCategory::kParse: return 3;
    case ErrorCategory::kEmptyInput: return 4;
    case ErrorCategory::kIo: return 5;
    case ErrorCategory::kRound: return 6;
  }
  return 1;
}

ParseError::ParseError(std::string file, int line, int column,
                       const std::string& what)
    : Error(ErrorCategory::kParse,
            file + ":" + std::to_string(line) + ":" + std::to_string(column) +
                ": " + what),
      file_(std::move(file)),
      line_(line),
      column_(column) {}

}  // namespace fedss
