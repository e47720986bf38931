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

#ifndef PRIVDISTILL_AGREEMENT_H_
#define PRIVDISTILL_AGREEMENT_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace privdistill {

enum class AlphaMetric { kNominal, kOrdinal, kInterval };

std::string_view AlphaMetricName(AlphaMetric metric);
// Throws Error(kInvalidArgument).
AlphaMetric ParseAlphaMetric(std::string_view name);

// Items x raters grid. values[i][r] is rater r's value for item i.
struct RatingMatrix {
  std::vector<std::string> item_ids;
  std::vector<std::string> rater_ids;
  std::vector<std::vector<std::optional<double>>> values;

  // Throws Error(kFormatError) when dimensions disagree with the id lists.
  void CheckShape() const;
};

// Long-form CSV with header "item_id,rater_id,value". Items and raters keep
// first-appearance order. Empty or "NA" values count as missing.
// Throws Error(kFormatError).
RatingMatrix ParseRatingMatrixCsv(std::string_view content);

// CSV "item_id,value" -> map. Throws Error(kFormatError).
std::map<std::string, double> ParseItemValuesCsv(std::string_view content);

struct AlphaResult {
  double alpha = 0.0;
  AlphaMetric metric = AlphaMetric::kInterval;
  size_t n_pairable = 0;
  double observed_disagreement = 0.0;  // Do
  double expected_disagreement = 0.0;  // De
};

nlohmann::json ToJson(const AlphaResult& result);

// Krippendorff's alpha from the coincidence matrix of pairable values.
//
// Items with fewer than two values are not pairable. Within an item with m
// values each ordered pair of distinct positions adds 1/(m-1) to o[c][k];
// n_c are the row sums and n their total. Then
//   Do = sum o[c][k] d2(c,k) / n
//   De = sum n_c n_k d2(c,k) / (n (n-1))
//   alpha = 1 - Do/De.
// The ordinal d2 between the c-th and k-th smallest distinct values is
// (sum_{g=c..k} n_g - (n_c + n_k)/2)^2.
//
// Throws TooFewValues (n < 2) and ZeroExpectedDisagreement (De == 0).
AlphaResult KrippendorffAlpha(const RatingMatrix& matrix, AlphaMetric metric);

// Two-rater alpha (model, reference) over the shared item ids. The reference
// may hold non-integer averages; nothing is rounded.
// Throws NoOverlap when fewer than two ids are shared.
AlphaResult AlphaVsReference(const std::map<std::string, double>& model,
                             const std::map<std::string, double>& reference,
                             AlphaMetric metric);

// Per-item mean over the available ratings of each item.
std::map<std::string, double> AverageRatings(const RatingMatrix& matrix);

struct SkippedAnnotator {
  std::string rater_id;
  std::string reason;
};

struct PairwiseAgreement {
  std::map<std::string, double> per_rater;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  std::vector<SkippedAnnotator> skipped;
};

nlohmann::json ToJson(const PairwiseAgreement& result);

// Alpha between the model and each annotator on the items that annotator
// rated. Annotators sharing fewer than two items with the model, or whose
// comparison has no expected disagreement, are skipped and reported.
// Throws NoEligibleAnnotators.
PairwiseAgreement PairwiseAlphaSuite(const std::map<std::string, double>& model,
                                     const RatingMatrix& humans, AlphaMetric metric);

}  // namespace privdistill

#endif  // PRIVDISTILL_AGREEMENT_H_
