// Copyright 2026 The Sonahunt Authors.
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

#include "sonahunt/error.hpp"

namespace sonahunt {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kDanglingReference: return "DanglingReference";
    case ErrorCode::kMissingDefinition: return "MissingDefinition";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kAllTokensOutOfVocabulary: return "AllTokensOutOfVocabulary";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kDuplicateDefinitionId: return "DuplicateDefinitionId";
    case ErrorCode::kUnnormalizedVector: return "UnnormalizedVector";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kUnknownWord: return "UnknownWord";
    case ErrorCode::kDefinitionWordMismatch: return "DefinitionWordMismatch";
    case ErrorCode::kEmptyJudgments: return "EmptyJudgments";
    case ErrorCode::kMissingEmbedding: return "MissingEmbedding";
    case ErrorCode::kMissingTarget: return "MissingTarget";
  }
  return "Unknown";
}

}  // namespace sonahunt
