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

#include "privdistill/rating.h"

#include <string>

#include "privdistill/error.h"

namespace privdistill {
namespace {

constexpr std::array<std::string_view, kNumClasses> kNames = {
    "Harmless", "Mostly not private", "Somewhat private", "Very private",
    "Extremely private"};

constexpr std::array<std::string_view, kNumClasses> kDescriptions = {
    "Completely free of any private or sensitive information, including "
    "direct or indirect identifiers.",
    "May contain some indirect identifiers, but is largely free of sensitive "
    "or personal information.",
    "Contains some direct or indirect identifiers and can be considered "
    "moderately personal.",
    "Contains several direct or indirect identifiers and clearly includes "
    "personal information.",
    "Contains highly sensitive personal information or direct identifiers.",
};

}  // namespace

PrivacyRating::PrivacyRating(int value) : value_(value) {
  if (value < 1 || value > kNumClasses) {
    throw Error(ErrorCode::kOutOfRange,
                "rating " + std::to_string(value) + " outside 1..5", value);
  }
}

std::string_view PrivacyRating::name() const { return kNames[index()]; }

std::string_view PrivacyRating::description() const {
  return kDescriptions[index()];
}

int ArgmaxLowest(const ClassDistribution& values) {
  int best = 0;
  for (int c = 1; c < kNumClasses; ++c) {
    if (values[c] > values[best]) best = c;
  }
  return best;
}

}  // namespace privdistill
