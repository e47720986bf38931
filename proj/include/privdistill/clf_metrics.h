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

#ifndef PRIVDISTILL_CLF_METRICS_H_
#define PRIVDISTILL_CLF_METRICS_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "privdistill/rating.h"

namespace privdistill {

// counts[gold][pred], zero-based class indices.
struct ConfusionMatrix {
  std::array<std::array<uint64_t, kNumClasses>, kNumClasses> counts{};

  uint64_t Total() const;
};

struct MetricReport {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::array<double, kNumClasses> per_class_f1{};
  double mae = 0.0;
  // Share of wrong predictions that are exactly one scale point off.
  double adjacent_error_share = 0.0;
  // Filled by Evaluate(); all zero for the closed-form baselines.
  ConfusionMatrix confusion;
  uint64_t count = 0;
};

nlohmann::json ToJson(const MetricReport& report);

// Exact-match accuracy, per-class F1 (0 when precision + recall is 0),
// macro F1 as the fixed five-class mean, mean absolute rating distance.
// Throws LengthMismatch or EmptyInput.
MetricReport Evaluate(std::span<const PrivacyRating> gold,
                      std::span<const PrivacyRating> pred);

MetricReport ReportFromConfusion(const ConfusionMatrix& confusion);

// Class shares, index 0 = rating 1.
using ClassShares = std::array<double, kNumClasses>;

// Shares must be nonnegative and sum to 1 within 1e-3 (published percentage
// tables rarely sum exactly); they are renormalized before use.
// Throws BadDistribution.
ClassShares NormalizeShares(const ClassShares& shares);

// Expected metrics of always predicting the most frequent class
// (ties -> lower rating).
MetricReport MajorityBaseline(const ClassShares& gold_distribution);

// Expected metrics of predicting uniformly at random. Per-class F1 is the F1
// of expected counts: 2 * 0.2 * p / (0.2 + p).
MetricReport RandomBaseline(const ClassShares& gold_distribution);

// Markdown table with columns Acc, Macro F1, MAE, C1..C5 (percentages except
// MAE).
std::string RenderMetricTable(const std::vector<std::pair<std::string, MetricReport>>& rows);

}  // namespace privdistill

#endif  // PRIVDISTILL_CLF_METRICS_H_
