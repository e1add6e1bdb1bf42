// Copyright 2026 The cabt Authors.
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
//
// Error type shared by every stage. Each failure carries a code so callers
// (and the CLI exit-code mapping) can tell input problems from runtime ones.

#ifndef CABT_ERROR_HPP_
#define CABT_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace cabt {

enum class ErrorCode {
  kSchema,
  kSemantic,
  kSyntax,
  kIllegalInstruction,
  kOverlap,
  kAlignment,
  kTargetOutOfRange,
  kMissingCacheSpec,
  kSyncProtocolViolation,
  kUnknownDevice,
  kDuplicateDevice,
  kOpLimitExceeded,
  kAddressOutOfRange,
  kAlreadyHalted,
  kMemoryFault,
  kFetchFault,
  kBadIndirectTarget,
  kIo,
  kInternal,
};

std::string_view to_string(ErrorCode code);

// True for errors caused by malformed inputs (descriptions, images,
// translated programs) rather than by executing a program.
bool is_input_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cabt

#endif  // CABT_ERROR_HPP_
