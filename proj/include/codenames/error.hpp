// Copyright 2026 The Codenames WSF Authors.
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

namespace codenames {

// Every failure surfaced by the library carries one of these codes. The
// service and CLI map them onto HTTP statuses and exit codes.
enum class ErrorCode {
  kEmptyToken,
  kInsufficientWords,
  kMalformedBoard,
  kOverlappingTeams,
  kWrongCount,
  kDimensionMismatch,
  kEmptyStore,
  kUnknownToken,
  kZeroVector,
  kEmptyCorpus,
  kApiQuotaExceeded,
  kNetworkFailure,
  kMissingKey,
  kIncompleteCache,
  kMalformedRecord,
  kUnknownBoardWord,
  kNoCandidates,
  kInvalidResponse,
  kUnknownClue,
  kInvalidConfig,
  kMissingResource,
  kUnknownSession,
  kSessionComplete,
  kValidationError,
  kStaleTrial,
  kIoError,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyToken: return "EmptyToken";
    case ErrorCode::kInsufficientWords: return "InsufficientWords";
    case ErrorCode::kMalformedBoard: return "MalformedBoard";
    case ErrorCode::kOverlappingTeams: return "OverlappingTeams";
    case ErrorCode::kWrongCount: return "WrongCount";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyStore: return "EmptyStore";
    case ErrorCode::kUnknownToken: return "UnknownToken";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kApiQuotaExceeded: return "ApiQuotaExceeded";
    case ErrorCode::kNetworkFailure: return "NetworkFailure";
    case ErrorCode::kMissingKey: return "MissingKey";
    case ErrorCode::kIncompleteCache: return "IncompleteCache";
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kUnknownBoardWord: return "UnknownBoardWord";
    case ErrorCode::kNoCandidates: return "NoCandidates";
    case ErrorCode::kInvalidResponse: return "InvalidResponse";
    case ErrorCode::kUnknownClue: return "UnknownClue";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kMissingResource: return "MissingResource";
    case ErrorCode::kUnknownSession: return "UnknownSession";
    case ErrorCode::kSessionComplete: return "SessionComplete";
    case ErrorCode::kValidationError: return "ValidationError";
    case ErrorCode::kStaleTrial: return "StaleTrial";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace codenames
