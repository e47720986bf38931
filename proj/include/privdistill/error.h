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

#ifndef PRIVDISTILL_ERROR_H_
#define PRIVDISTILL_ERROR_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace privdistill {

// Every failure raised by the library carries one of these codes. The CLI maps
// codes onto process exit statuses through ErrorCategoryOf().
enum class ErrorCode {
  // corpus
  kFileUnreadable,
  kFormatError,
  kEmptyCorpus,
  kInsufficientData,
  kBadFractions,
  kMissingRatings,
  // teacher
  kEmptyText,
  kOutOfRange,
  kNoRatingFound,
  kEndpointUnreachable,
  // agreement
  kTooFewValues,
  kZeroExpectedDisagreement,
  kNoOverlap,
  kNoEligibleAnnotators,
  // clf-metrics
  kLengthMismatch,
  kEmptyInput,
  kBadDistribution,
  // scorer
  kEmptyTrainingSet,
  kUnlabeledRecord,
  kProtocolError,
  // deid
  kInvalidSpan,
  kScorerFailure,
  // generic precondition violation (bad config value, bad argument)
  kInvalidArgument,
};

enum class ErrorCategory { kUsage, kData, kEndpoint };

std::string_view ErrorCodeName(ErrorCode code);
ErrorCategory ErrorCategoryOf(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  // OutOfRange carries the offending integer.
  Error(ErrorCode code, const std::string& message, long long value)
      : Error(code, message) {
    value_ = value;
  }

  // Wraps another failure; cause() keeps the original code.
  Error(ErrorCode code, const std::string& message, ErrorCode cause)
      : Error(code, message) {
    cause_ = cause;
  }

  ErrorCode code() const { return code_; }
  std::optional<long long> value() const { return value_; }
  std::optional<ErrorCode> cause() const { return cause_; }

 private:
  ErrorCode code_;
  std::optional<long long> value_;
  std::optional<ErrorCode> cause_;
};

}  // namespace privdistill

#endif  // PRIVDISTILL_ERROR_H_
