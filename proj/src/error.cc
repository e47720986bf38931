/*
 * Copyright 2026 The privdistill Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "privdistill/error.h"

namespace privdistill {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFileUnreadable: return "FileUnreadable";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kBadFractions: return "BadFractions";
    case ErrorCode::kMissingRatings: return "MissingRatings";
    case ErrorCode::kEmptyText: return "EmptyText";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kNoRatingFound: return "NoRatingFound";
    case ErrorCode::kEndpointUnreachable: return "EndpointUnreachable";
    case ErrorCode::kTooFewValues: return "TooFewValues";
    case ErrorCode::kZeroExpectedDisagreement: return "ZeroExpectedDisagreement";
    case ErrorCode::kNoOverlap: return "NoOverlap";
    case ErrorCode::kNoEligibleAnnotators: return "NoEligibleAnnotators";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kBadDistribution: return "BadDistribution";
    case ErrorCode::kEmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::kUnlabeledRecord: return "UnlabeledRecord";
    case ErrorCode::kProtocolError: return "ProtocolError";
    case ErrorCode::kInvalidSpan: return "InvalidSpan";
    case ErrorCode::kScorerFailure: return "ScorerFailure";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

ErrorCategory ErrorCategoryOf(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEndpointUnreachable:
    case ErrorCode::kProtocolError:
      return ErrorCategory::kEndpoint;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kBadFractions:
      return ErrorCategory::kUsage;
    default:
      return ErrorCategory::kData;
  }
}

}  // namespace privdistill
