// Copyright 2026 The heatloss Authors
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
#include <type_traits>

namespace heatloss {

enum class ErrorCode {
  kInvalidArgument,
  kDimMismatch,
  kSchemaViolation,
  kIoError,
  kInvalidGroundTruth,
  kInfeasibleSynth,
  kNonFiniteLoss,
  kInternal,
};

/// Stable machine-readable name ("DIM_MISMATCH", ...) used by the CLI error JSON.
std::string_view error_code_name(ErrorCode code) noexcept;

/// The single exception type thrown by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

/// Throws when condition is false. `message` is a string or a callable
/// returning one; a callable is only invoked on failure.
template <typename Message>
inline void require(bool condition, ErrorCode code, Message&& message) {
  if (condition) [[likely]]
    return;
  if constexpr (std::is_invocable_v<Message>)
    fail(code, std::string(message()));
  else
    fail(code, std::string(message));
}

}  // namespace heatloss
