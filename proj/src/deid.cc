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

#include "privdistill/deid.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "privdistill/error.h"
#include "privdistill/random.h"
#include "privdistill/tabular_io.h"
#include "privdistill/text_util.h"

namespace privdistill {

using nlohmann::json;

std::string_view SpanCategoryName(SpanCategory category) {
  switch (category) {
    case SpanCategory::kDirect: return "DIRECT";
    case SpanCategory::kQuasi: return "QUASI";
    case SpanCategory::kNoMask: return "NO_MASK";
  }
  return "NO_MASK";
}

SpanCategory ParseSpanCategory(std::string_view name) {
  if (name == "DIRECT") return SpanCategory::kDirect;
  if (name == "QUASI") return SpanCategory::kQuasi;
  if (name == "NO_MASK") return SpanCategory::kNoMask;
  throw Error(ErrorCode::kFormatError, "unknown span category '" + std::string(name) + "'");
}

std::string_view MaskConditionName(MaskCondition condition) {
  switch (condition) {
    case MaskCondition::kOriginal: return "ORIGINAL";
    case MaskCondition::kDirect: return "DIRECT";
    case MaskCondition::kQuasi: return "QUASI";
    case MaskCondition::kAll: return "ALL";
    case MaskCondition::kRandom: return "RANDOM";
  }
  return "ORIGINAL";
}

void StandoffDoc::Validate() const {
  for (const auto& span : spans) {
    if (span.start >= span.end || span.end > text.size()) {
      throw Error(ErrorCode::kInvalidSpan,
                  "doc " + doc_id + ": span [" + std::to_string(span.start) + ", " +
                      std::to_string(span.end) + ") invalid for text of " +
                      std::to_string(text.size()) + " bytes");
    }
  }
}

std::vector<StandoffDoc> ParseStandoffDocs(std::string_view content) {
  std::vector<StandoffDoc> docs;
  size_t index = 0;
  for (const json& object : ParseJsonArrayOrLines(content)) {
    ++index;
    StandoffDoc doc;
    try {
      doc.doc_id = object.at("doc_id").get<std::string>();
      doc.text = object.at("text").get<std::string>();
      for (const json& span : object.value("spans", json::array())) {
        const auto start = span.at("start").get<int64_t>();
        const auto end = span.at("end").get<int64_t>();
        if (start < 0 || end < 0) {
          throw Error(ErrorCode::kInvalidSpan,
                      "doc " + doc.doc_id + ": negative span offset");
        }
        doc.spans.push_back({static_cast<size_t>(start), static_cast<size_t>(end),
                             ParseSpanCategory(span.at("category").get<std::string>())});
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kFormatError,
                  "document " + std::to_string(index) + ": " + e.what());
    }
    doc.Validate();
    docs.push_back(std::move(doc));
  }
  return docs;
}

namespace {

bool Selected(SpanCategory category, MaskCondition condition) {
  switch (condition) {
    case MaskCondition::kDirect: return category == SpanCategory::kDirect;
    case MaskCondition::kQuasi: return category == SpanCategory::kQuasi;
    case MaskCondition::kAll:
      return category == SpanCategory::kDirect || category == SpanCategory::kQuasi;
    default: return false;
  }
}

}  // namespace

MaskedText ApplyMask(const StandoffDoc& doc, MaskCondition condition) {
  if (condition == MaskCondition::kRandom) {
    throw Error(ErrorCode::kInvalidArgument, "use RandomMask for the RANDOM condition");
  }
  doc.Validate();
  std::vector<std::pair<size_t, size_t>> regions;
  MaskedText out;
  for (const auto& span : doc.spans) {
    if (!Selected(span.category, condition)) continue;
    ++out.selected_spans;
    regions.emplace_back(span.start, span.end);
  }
  std::sort(regions.begin(), regions.end());
  std::vector<std::pair<size_t, size_t>> merged;
  for (const auto& region : regions) {
    if (!merged.empty() && region.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, region.second);
    } else {
      merged.push_back(region);
    }
  }
  out.text = doc.text;
  for (auto it = merged.rbegin(); it != merged.rend(); ++it) {
    out.text.replace(it->first, it->second - it->first, kRedactionToken);
  }
  out.masked_count = merged.size();
  return out;
}

RandomMaskedText RandomMask(const StandoffDoc& doc, double fraction, uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "random mask fraction must be in (0, 1)");
  }
  const auto words = WordSpans(doc.text);
  const size_t k = static_cast<size_t>(std::round(fraction * static_cast<double>(words.size())));
  std::vector<size_t> order(words.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  for (size_t i = 0; i < k; ++i) {
    std::swap(order[i], order[i + rng.UniformBelow(order.size() - i)]);
  }
  std::vector<size_t> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(chosen.rbegin(), chosen.rend());

  RandomMaskedText out{doc.text, k};
  for (size_t w : chosen) {
    out.text.replace(words[w].first, words[w].second - words[w].first, kRedactionToken);
  }
  return out;
}

json ToJson(const DeidReport& report) {
  return json{{"condition", std::string(MaskConditionName(report.condition))},
              {"mean_score", report.mean_score},
              {"delta", report.delta},
              {"pct_class1", report.pct_class1},
              {"masked_entity_count", report.masked_entity_count},
              {"selected_span_count", report.selected_span_count}};
}

std::vector<DeidReport> EvaluateConditions(const std::vector<StandoffDoc>& docs,
                                           Scorer& scorer, double fraction,
                                           uint64_t seed, size_t batch_size) {
  if (docs.empty()) throw Error(ErrorCode::kEmptyInput, "no documents");
  if (batch_size == 0) throw Error(ErrorCode::kInvalidArgument, "batch_size must be >= 1");
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "random mask fraction must be in (0, 1)");
  }

  constexpr MaskCondition kConditions[] = {MaskCondition::kOriginal, MaskCondition::kDirect,
                                           MaskCondition::kQuasi, MaskCondition::kAll,
                                           MaskCondition::kRandom};
  std::vector<DeidReport> reports;
  for (MaskCondition condition : kConditions) {
    DeidReport report;
    report.condition = condition;
    std::vector<std::string> texts;
    texts.reserve(docs.size());
    for (const auto& doc : docs) {
      if (condition == MaskCondition::kRandom) {
        auto masked = RandomMask(doc, fraction, MixSeed(seed, Fnv1a64(doc.doc_id)));
        report.masked_entity_count += masked.masked_words;
        texts.push_back(std::move(masked.text));
      } else {
        auto masked = ApplyMask(doc, condition);
        report.masked_entity_count += masked.masked_count;
        report.selected_span_count += masked.selected_spans;
        texts.push_back(std::move(masked.text));
      }
    }

    const std::string context = "scoring condition " + std::string(MaskConditionName(condition));
    std::vector<ScoredText> scored;
    scored.reserve(texts.size());
    for (size_t begin = 0; begin < texts.size(); begin += batch_size) {
      const std::span<const std::string> chunk(
          texts.data() + begin, std::min(batch_size, texts.size() - begin));
      std::vector<ScoredText> part;
      try {
        part = scorer.ScoreBatch(chunk);
      } catch (const Error& e) {
        throw Error(ErrorCode::kScorerFailure, context + ": " + e.what(), e.code());
      } catch (const std::exception& e) {
        throw Error(ErrorCode::kScorerFailure, context + ": " + e.what());
      }
      if (part.size() != chunk.size()) {
        throw Error(ErrorCode::kScorerFailure,
                    context + ": scorer returned " + std::to_string(part.size()) +
                        " ratings for " + std::to_string(chunk.size()) + " texts");
      }
      scored.insert(scored.end(), part.begin(), part.end());
    }

    double sum = 0.0;
    size_t class1 = 0;
    for (const auto& s : scored) {
      sum += s.rating.value();
      if (s.rating.value() == 1) ++class1;
    }
    const double n = static_cast<double>(scored.size());
    report.mean_score = sum / n;
    report.pct_class1 = 100.0 * static_cast<double>(class1) / n;
    report.delta = reports.empty() ? 0.0 : reports.front().mean_score - report.mean_score;
    reports.push_back(report);
  }
  return reports;
}

std::string RenderDeidTable(const std::vector<DeidReport>& reports, double fraction) {
  std::string out =
      "| Condition | S | Delta | % Class 1 |\n"
      "|---|---:|---:|---:|\n";
  char buffer[128];
  for (const auto& report : reports) {
    std::string name;
    switch (report.condition) {
      case MaskCondition::kOriginal: name = "Original"; break;
      case MaskCondition::kDirect: name = "Mask DIRECT"; break;
      case MaskCondition::kQuasi: name = "Mask QUASI"; break;
      case MaskCondition::kAll: name = "Mask ALL"; break;
      case MaskCondition::kRandom:
        std::snprintf(buffer, sizeof(buffer), "Mask %g%% random", 100.0 * fraction);
        name = buffer;
        break;
    }
    if (report.condition == MaskCondition::kOriginal) {
      std::snprintf(buffer, sizeof(buffer), "| %s | %.2f | -- | %.1f |\n", name.c_str(),
                    report.mean_score, report.pct_class1);
    } else {
      std::snprintf(buffer, sizeof(buffer), "| %s | %.2f | %.2f | %.1f |\n", name.c_str(),
                    report.mean_score, report.delta, report.pct_class1);
    }
    out += buffer;
  }
  return out;
}

}  // namespace privdistill
