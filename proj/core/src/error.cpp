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

#include "cabt/error.hpp"

namespace cabt {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchema: return "SchemaError";
    case ErrorCode::kSemantic: return "SemanticError";
    case ErrorCode::kSyntax: return "SyntaxError";
    case ErrorCode::kIllegalInstruction: return "IllegalInstruction";
    case ErrorCode::kOverlap: return "OverlapError";
    case ErrorCode::kAlignment: return "AlignmentError";
    case ErrorCode::kTargetOutOfRange: return "TargetOutOfRange";
    case ErrorCode::kMissingCacheSpec: return "MissingCacheSpec";
    case ErrorCode::kSyncProtocolViolation: return "SyncProtocolViolation";
    case ErrorCode::kUnknownDevice: return "UnknownDevice";
    case ErrorCode::kDuplicateDevice: return "DuplicateDevice";
    case ErrorCode::kOpLimitExceeded: return "OpLimitExceeded";
    case ErrorCode::kAddressOutOfRange: return "AddressOutOfRange";
    case ErrorCode::kAlreadyHalted: return "AlreadyHalted";
    case ErrorCode::kMemoryFault: return "MemoryFault";
    case ErrorCode::kFetchFault: return "FetchFault";
    case ErrorCode::kBadIndirectTarget: return "BadIndirectTarget";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kInternal: return "InternalError";
  }
  return "Error";
}

bool is_input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchema:
    case ErrorCode::kSemantic:
    case ErrorCode::kSyntax:
    case ErrorCode::kIllegalInstruction:
    case ErrorCode::kOverlap:
    case ErrorCode::kAlignment:
    case ErrorCode::kTargetOutOfRange:
    case ErrorCode::kMissingCacheSpec:
    case ErrorCode::kIo:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

}  // namespace cabt
