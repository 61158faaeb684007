// Copyright 2026 The trailkit Authors. All Rights Reserved.
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trailkit {

/// Coarse failure classes. The CLI prints the category name as the first
/// token of its one-line error report.
enum class ErrorCategory { kIo, kFormat, kRange, kConfig, kPrecondition, kNumeric };

constexpr std::string_view to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kIo: return "io";
    case ErrorCategory::kFormat: return "format";
    case ErrorCategory::kRange: return "range";
    case ErrorCategory::kConfig: return "config";
    case ErrorCategory::kPrecondition: return "precondition";
    case ErrorCategory::kNumeric: return "numeric";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory c, const std::string& what) { throw Error(c, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCategory::kPrecondition, what);
}

}  // namespace trailkit
