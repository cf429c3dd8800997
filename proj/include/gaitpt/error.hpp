// Copyright 2026 The GaitPT Lab Authors
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

namespace gaitpt {

enum class ErrorKind {
  Dimension,      // tensor shape mismatch
  NumericInput,   // non-finite values where finite ones are required
  Config,         // invalid model/training configuration
  Input,          // invalid caller-supplied values
  Usage,          // API misuse (e.g. backward on a non-scalar)
  Format,         // malformed file content
  Io,             // filesystem failures
  Integrity,      // checksum / payload length mismatch
  Protocol,       // evaluation protocol gaps
  Statistics,     // degenerate statistical samples
  Sampling,       // batch composition preconditions
  TooShort,       // sequence shorter than the requested window
};

std::string_view to_string(ErrorKind kind) noexcept;

/// what() reads "<kind>: <message>".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void check(bool cond, ErrorKind kind, const std::string& message) {
  if (!cond) fail(kind, message);
}

}  // namespace gaitpt
