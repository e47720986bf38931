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

#ifndef PRIVDISTILL_DEID_H_
#define PRIVDISTILL_DEID_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "privdistill/scorer.h"

namespace privdistill {

inline constexpr std::string_view kRedactionToken = "[REDACTED]";

enum class SpanCategory { kDirect, kQuasi, kNoMask };

std::string_view SpanCategoryName(SpanCategory category);
SpanCategory ParseSpanCategory(std::string_view name);

// Byte offsets into the original document text, half-open.
struct EntitySpan {
  size_t start = 0;
  size_t end = 0;
  SpanCategory category = SpanCategory::kNoMask;
};

struct StandoffDoc {
  std::string doc_id;
  std::string text;
  std::vector<EntitySpan> spans;

  // Throws Error(kInvalidSpan) unless 0 <= start < end <= text.size().
  void Validate() const;
};

// {"doc_id", "text", "spans": [{"start", "end", "category"}]} documents, as a
// JSON array or one object per line. Throws FormatError / InvalidSpan.
std::vector<StandoffDoc> ParseStandoffDocs(std::string_view content);

enum class MaskCondition { kOriginal, kDirect, kQuasi, kAll, kRandom };

std::string_view MaskConditionName(MaskCondition condition);

struct MaskedText {
  std::string text;
  size_t masked_count = 0;    // merged regions replaced
  size_t selected_spans = 0;  // raw spans matching the condition
};

// Replaces every span selected by the condition (ALL = DIRECT + QUASI, NO_MASK
// never) with kRedactionToken. Overlapping or touching spans collapse into one
// region and one token. ORIGINAL returns the text untouched.
// Throws InvalidSpan; InvalidArgument for RANDOM.
MaskedText ApplyMask(const StandoffDoc& doc, MaskCondition condition);

struct RandomMaskedText {
  std::string text;
  size_t masked_words = 0;
};

// Replaces round(fraction * words) whitespace-delimited words, chosen
// uniformly without replacement, with kRedactionToken; whitespace is kept.
// round() is half away from zero. Throws InvalidArgument unless
// 0 < fraction < 1.
RandomMaskedText RandomMask(const StandoffDoc& doc, double fraction, uint64_t seed);

struct DeidReport {
  MaskCondition condition = MaskCondition::kOriginal;
  double mean_score = 0.0;
  double delta = 0.0;  // ORIGINAL mean - this mean
  double pct_class1 = 0.0;
  size_t masked_entity_count = 0;  // merged regions (words for RANDOM)
  size_t selected_span_count = 0;  // raw annotated spans selected
};

nlohmann::json ToJson(const DeidReport& report);

// Scores ORIGINAL, DIRECT, QUASI, ALL and RANDOM versions of every document and
// returns one report per condition in that order. Each random mask uses a
// per-document seed derived from `seed` and the doc id.
// Throws EmptyInput; ScorerFailure (with the condition name and the original
// error code as cause) when the scorer throws or returns the wrong count.
std::vector<DeidReport> EvaluateConditions(const std::vector<StandoffDoc>& docs,
                                           Scorer& scorer, double fraction,
                                           uint64_t seed, size_t batch_size = 64);

// Markdown table: Condition | S | Delta | % Class 1.
std::string RenderDeidTable(const std::vector<DeidReport>& reports, double fraction);

}  // namespace privdistill

#endif  // PRIVDISTILL_DEID_H_
