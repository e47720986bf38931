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

#ifndef PRIVDISTILL_CORPUS_H_
#define PRIVDISTILL_CORPUS_H_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "privdistill/rating.h"

namespace privdistill {

enum class Split { kTrain, kVal, kTest };

std::string_view SplitName(Split split);
// Accepts "train", "val"/"validation", "test". Throws Error(kFormatError).
Split ParseSplit(std::string_view name);

struct TextRecord {
  std::string id;
  std::string text;
  std::string dataset;
  std::optional<PrivacyRating> teacher_rating;
  std::optional<Split> split;
};

nlohmann::json ToJson(const TextRecord& record);
// Throws Error(kFormatError) on schema violations.
TextRecord TextRecordFromJson(const nlohmann::json& object);

enum class InputFormat { kJsonl, kCsv, kPlainLines };

// Accepts "jsonl", "csv", "lines"/"plain-lines".
InputFormat ParseInputFormat(std::string_view name);

struct IngestResult {
  std::vector<TextRecord> records;
  size_t dropped_empty = 0;
};

// Reads one raw dataset. Ids are "<dataset>-<fnv64 hex of text>", with
// "-<k>" appended for the k-th repeat of identical text. JSONL rows that
// already carry "id"/"dataset"/"teacher_rating"/"split" keep them, so
// previously written corpora load back unchanged.
//
// Throws FileUnreadable, FormatError (with row number) or EmptyCorpus.
IngestResult Ingest(const std::string& path, const std::string& dataset,
                    InputFormat format);
IngestResult IngestContent(std::string_view content, const std::string& dataset,
                           InputFormat format);

// JSONL of TextRecord, one per line.
std::string RecordsToJsonl(const std::vector<TextRecord>& records);

// Reads a JSONL corpus written by RecordsToJsonl. Ids must be present and
// unique. Throws FormatError.
std::vector<TextRecord> LoadRecordsJsonl(std::string_view content);

// One normalized-text hash per line; blank lines and '#' comments ignored.
std::unordered_set<std::string> ParseExclusionList(std::string_view content);

// Draws exactly n records uniformly without replacement from those whose
// NormalizedTextHash is not in `exclude`. The result keeps input order.
// Throws InsufficientData.
std::vector<TextRecord> SampleExcluding(
    const std::vector<TextRecord>& records, size_t n,
    const std::unordered_set<std::string>& exclude, uint64_t seed);

struct SplitFractions {
  double train = 0.9;
  double val = 0.05;
  double test = 0.05;
};

// Random (unstratified) partition. Validation and test sizes are
// floor(n * fraction); train takes the remainder. Throws BadFractions.
std::vector<TextRecord> AssignSplits(std::vector<TextRecord> records,
                                     const SplitFractions& fractions,
                                     uint64_t seed);

using Tokenizer = std::function<size_t(std::string_view)>;

// Counts whitespace-delimited tokens.
size_t WhitespaceTokenCount(std::string_view text);

struct DatasetStats {
  std::string dataset;
  size_t count = 0;
  double avg_tokens = 0.0;
  double mean_score = 0.0;
  double pct_private = 0.0;
  std::array<double, kNumClasses> class_shares{};
};

nlohmann::json ToJson(const DatasetStats& stats);
DatasetStats DatasetStatsFromJson(const nlohmann::json& object);

inline constexpr std::string_view kAllDatasets = "All";

// One row per dataset, sorted by mean score descending (ties by tag), followed
// by the "All" aggregate. Throws MissingRatings listing offending ids.
std::vector<DatasetStats> ComputeStats(const std::vector<TextRecord>& records,
                                       const Tokenizer& tokenizer =
                                           WhitespaceTokenCount);

// Markdown table: Dataset | Avg tokens | S | % Priv.
std::string RenderStatsTable(const std::vector<DatasetStats>& stats);

}  // namespace privdistill

#endif  // PRIVDISTILL_CORPUS_H_
