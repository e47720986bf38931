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

#ifndef PRIVDISTILL_RATING_H_
#define PRIVDISTILL_RATING_H_

#include <array>
#include <compare>
#include <string_view>

namespace privdistill {

inline constexpr int kNumClasses = 5;

// A point on the 1..5 privacy sensitivity scale. Construction validates the
// range; name and description are derived from the value.
class PrivacyRating {
 public:
  // Throws Error(kOutOfRange) unless 1 <= value <= 5.
  explicit PrivacyRating(int value);

  // Zero-based class index (rating - 1).
  static PrivacyRating FromIndex(int index) { return PrivacyRating(index + 1); }

  int value() const { return value_; }
  int index() const { return value_ - 1; }
  std::string_view name() const;
  std::string_view description() const;

  friend auto operator<=>(const PrivacyRating&, const PrivacyRating&) = default;

 private:
  int value_;
};

// Class distribution over the five ratings, index 0 = rating 1.
using ClassDistribution = std::array<double, kNumClasses>;

// Index of the largest entry; ties resolve to the lowest index.
int ArgmaxLowest(const ClassDistribution& values);

}  // namespace privdistill

#endif  // PRIVDISTILL_RATING_H_
