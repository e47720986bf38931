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

#include "privdistill/corpus.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <unordered_map>

#include "privdistill/error.h"
#include "privdistill/random.h"
#include "privdistill/tabular_io.h"
#include "privdistill/text_util.h"

namespace privdistill {

using nlohmann::json;

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

Split ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val" || name == "validation") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw Error(ErrorCode::kFormatError, "unknown split '" + std::string(name) + "'");
}

InputFormat ParseInputFormat(std::string_view name) {
  if (name == "jsonl") return InputFormat::kJsonl;
  if (name == "csv") return InputFormat::kCsv;
  if (name == "lines" || name == "plain-lines") return InputFormat::kPlainLines;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown input format '" + std::string(name) + "'");
}

json ToJson(const TextRecord& record) {
  json out;
  out["id"] = record.id;
  out["text"] = record.text;
  out["dataset"] = record.dataset;
  out["teacher_rating"] = record.teacher_rating
                              ? json(record.teacher_rating->value())
                              : json(nullptr);
  out["split"] = record.split ? json(std::string(SplitName(*record.split)))
                              : json(nullptr);
  return out;
}

TextRecord TextRecordFromJson(const json& object) {
  TextRecord record;
  try {
    record.id = object.at("id").get<std::string>();
    record.text = object.at("text").get<std::string>();
    record.dataset = object.value("dataset", std::string());
    if (object.contains("teacher_rating") && !object["teacher_rating"].is_null()) {
      record.teacher_rating = PrivacyRating(object["teacher_rating"].get<int>());
    }
    if (object.contains("split") && !object["split"].is_null()) {
      record.split = ParseSplit(object["split"].get<std::string>());
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("record: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kFormatError, std::string("record: ") + e.what());
  }
  return record;
}

namespace {

struct RawRow {
  size_t row_number;
  std::string text;
  json extra;  // optional JSONL fields
};

std::vector<RawRow> ReadPlainLines(std::string_view content) {
  std::vector<RawRow> rows;
  size_t pos = 0;
  size_t row = 0;
  while (pos < content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    rows.push_back({++row, std::string(line), json()});
    pos = end + 1;
  }
  return rows;
}

std::vector<RawRow> ReadCsvRows(std::string_view content) {
  const auto csv = ParseCsv(content);
  if (csv.empty()) return {};
  const auto& header = csv.front().fields;
  const auto it = std::find(header.begin(), header.end(), "text");
  if (it == header.end()) {
    throw Error(ErrorCode::kFormatError, "row 1: CSV header lacks a \"text\" column");
  }
  const size_t text_column = it - header.begin();
  std::vector<RawRow> rows;
  for (size_t r = 1; r < csv.size(); ++r) {
    if (csv[r].fields.size() != header.size()) {
      throw Error(ErrorCode::kFormatError,
                  "row " + std::to_string(r + 1) + " (line " +
                      std::to_string(csv[r].line_number) + "): expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(csv[r].fields.size()));
    }
    rows.push_back({r + 1, csv[r].fields[text_column], json()});
  }
  return rows;
}

std::vector<RawRow> ReadJsonlRows(std::string_view content) {
  std::vector<RawRow> rows;
  ForEachJsonLine(content, [&](size_t line, const json& object) {
    const auto text = object.find("text");
    if (text == object.end() || !text->is_string()) {
      throw Error(ErrorCode::kFormatError,
                  "row " + std::to_string(line) + ": missing string field \"text\"");
    }
    rows.push_back({line, text->get<std::string>(), object});
  });
  return rows;
}

}  // namespace

IngestResult IngestContent(std::string_view content, const std::string& dataset,
                           InputFormat format) {
  std::vector<RawRow> rows;
  switch (format) {
    case InputFormat::kPlainLines: rows = ReadPlainLines(content); break;
    case InputFormat::kCsv: rows = ReadCsvRows(content); break;
    case InputFormat::kJsonl: rows = ReadJsonlRows(content); break;
  }

  IngestResult result;
  std::unordered_map<std::string, size_t> repeats;
  std::unordered_map<std::string, size_t> seen_ids;
  for (auto& row : rows) {
    if (Trim(row.text).empty()) {
      ++result.dropped_empty;
      continue;
    }
    TextRecord record;
    record.dataset = dataset;
    const std::string where = "row " + std::to_string(row.row_number);
    if (row.extra.is_object()) {
      try {
        if (row.extra.contains("dataset") && row.extra["dataset"].is_string()) {
          record.dataset = row.extra["dataset"].get<std::string>();
        }
        if (row.extra.contains("id") && !row.extra["id"].is_null()) {
          record.id = row.extra["id"].get<std::string>();
        }
        if (row.extra.contains("teacher_rating") &&
            !row.extra["teacher_rating"].is_null()) {
          record.teacher_rating = PrivacyRating(row.extra["teacher_rating"].get<int>());
        }
        if (row.extra.contains("split") && !row.extra["split"].is_null()) {
          record.split = ParseSplit(row.extra["split"].get<std::string>());
        }
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kFormatError, where + ": " + e.what());
      } catch (const Error& e) {
        throw Error(ErrorCode::kFormatError, where + ": " + e.what());
      }
    }
    if (record.dataset.empty()) {
      throw Error(ErrorCode::kFormatError, where + ": no dataset tag");
    }
    if (record.id.empty()) {
      const std::string base = record.dataset + "-" + HexU64(Fnv1a64(row.text));
      const size_t k = repeats[base]++;
      record.id = k == 0 ? base : base + "-" + std::to_string(k);
    }
    if (!seen_ids.emplace(record.id, row.row_number).second) {
      throw Error(ErrorCode::kFormatError,
                  where + ": duplicate id '" + record.id + "'");
    }
    record.text = std::move(row.text);
    result.records.push_back(std::move(record));
  }
  if (result.records.empty()) {
    throw Error(ErrorCode::kEmptyCorpus,
                "no non-empty texts (" + std::to_string(result.dropped_empty) +
                    " dropped)");
  }
  return result;
}

IngestResult Ingest(const std::string& path, const std::string& dataset,
                    InputFormat format) {
  const std::string content = ReadFile(path);
  try {
    return IngestContent(content, dataset, format);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kFormatError) {
      throw Error(ErrorCode::kFormatError, path + ": " + e.what());
    }
    throw;
  }
}

std::string RecordsToJsonl(const std::vector<TextRecord>& records) {
  std::string out;
  for (const auto& record : records) {
    out += ToJson(record).dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<TextRecord> LoadRecordsJsonl(std::string_view content) {
  std::vector<TextRecord> records;
  std::unordered_set<std::string> ids;
  ForEachJsonLine(content, [&](size_t line, const json& object) {
    try {
      records.push_back(TextRecordFromJson(object));
    } catch (const Error& e) {
      throw Error(ErrorCode::kFormatError, "line " + std::to_string(line) + ": " + e.what());
    }
    if (!ids.insert(records.back().id).second) {
      throw Error(ErrorCode::kFormatError, "line " + std::to_string(line) +
                                               ": duplicate id '" + records.back().id + "'");
    }
  });
  return records;
}

std::unordered_set<std::string> ParseExclusionList(std::string_view content) {
  std::unordered_set<std::string> hashes;
  size_t pos = 0;
  while (pos < content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    const auto line = Trim(content.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    hashes.emplace(line);
  }
  return hashes;
}

std::vector<TextRecord> SampleExcluding(
    const std::vector<TextRecord>& records, size_t n,
    const std::unordered_set<std::string>& exclude, uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "sample size must be >= 1");
  std::vector<size_t> eligible;
  for (size_t i = 0; i < records.size(); ++i) {
    if (!exclude.contains(NormalizedTextHash(records[i].text))) {
      eligible.push_back(i);
    }
  }
  if (eligible.size() < n) {
    throw Error(ErrorCode::kInsufficientData,
                "requested " + std::to_string(n) + " records but only " +
                    std::to_string(eligible.size()) + " are eligible");
  }
  // Partial Fisher-Yates over the eligible indices.
  Rng rng(seed);
  for (size_t i = 0; i < n; ++i) {
    const size_t j = i + rng.UniformBelow(eligible.size() - i);
    std::swap(eligible[i], eligible[j]);
  }
  eligible.resize(n);
  std::sort(eligible.begin(), eligible.end());
  std::vector<TextRecord> sample;
  sample.reserve(n);
  for (size_t i : eligible) sample.push_back(records[i]);
  return sample;
}

std::vector<TextRecord> AssignSplits(std::vector<TextRecord> records,
                                     const SplitFractions& fractions,
                                     uint64_t seed) {
  const double sum = fractions.train + fractions.val + fractions.test;
  if (!(fractions.train > 0 && fractions.val > 0 && fractions.test > 0) ||
      std::abs(sum - 1.0) > 1e-9) {
    std::ostringstream message;
    message << "fractions must be positive and sum to 1, got (" << fractions.train
            << ", " << fractions.val << ", " << fractions.test << ")";
    throw Error(ErrorCode::kBadFractions, message.str());
  }
  const size_t n = records.size();
  // The epsilon keeps products like 100 * 0.29 from flooring one short.
  const auto floor_size = [n](double fraction) {
    return static_cast<size_t>(std::floor(static_cast<double>(n) * fraction + 1e-9));
  };
  const size_t n_val = floor_size(fractions.val);
  const size_t n_test = floor_size(fractions.test);
  const size_t n_train = n - n_val - n_test;

  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.Shuffle(order);
  for (size_t rank = 0; rank < n; ++rank) {
    Split split = Split::kTrain;
    if (rank >= n_train + n_val) {
      split = Split::kTest;
    } else if (rank >= n_train) {
      split = Split::kVal;
    }
    records[order[rank]].split = split;
  }
  return records;
}

size_t WhitespaceTokenCount(std::string_view text) {
  return WordSpans(text).size();
}

json ToJson(const DatasetStats& stats) {
  return json{{"dataset", stats.dataset},
              {"count", stats.count},
              {"avg_tokens", stats.avg_tokens},
              {"mean_score", stats.mean_score},
              {"pct_private", stats.pct_private},
              {"class_shares", stats.class_shares}};
}

DatasetStats DatasetStatsFromJson(const json& object) {
  DatasetStats stats;
  try {
    stats.dataset = object.at("dataset").get<std::string>();
    stats.count = object.at("count").get<size_t>();
    stats.avg_tokens = object.at("avg_tokens").get<double>();
    stats.mean_score = object.at("mean_score").get<double>();
    stats.pct_private = object.at("pct_private").get<double>();
    stats.class_shares =
        object.at("class_shares").get<std::array<double, kNumClasses>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("stats: ") + e.what());
  }
  return stats;
}

namespace {

struct StatsAccumulator {
  size_t count = 0;
  size_t tokens = 0;
  std::array<size_t, kNumClasses> class_counts{};

  void Add(const TextRecord& record, size_t token_count) {
    ++count;
    tokens += token_count;
    ++class_counts[record.teacher_rating->index()];
  }

  DatasetStats Finish(std::string dataset) const {
    DatasetStats stats;
    stats.dataset = std::move(dataset);
    stats.count = count;
    if (count == 0) return stats;
    const double total = static_cast<double>(count);
    stats.avg_tokens = static_cast<double>(tokens) / total;
    for (int c = 0; c < kNumClasses; ++c) {
      stats.class_shares[c] = static_cast<double>(class_counts[c]) / total;
      stats.mean_score += (c + 1) * stats.class_shares[c];
    }
    stats.pct_private =
        100.0 * (stats.class_shares[2] + stats.class_shares[3] + stats.class_shares[4]);
    return stats;
  }
};

}  // namespace

std::vector<DatasetStats> ComputeStats(const std::vector<TextRecord>& records,
                                       const Tokenizer& tokenizer) {
  std::vector<std::string> missing;
  for (const auto& record : records) {
    if (!record.teacher_rating) missing.push_back(record.id);
  }
  if (!missing.empty()) {
    std::string ids;
    for (size_t i = 0; i < missing.size() && i < 20; ++i) {
      if (i) ids += ", ";
      ids += missing[i];
    }
    if (missing.size() > 20) ids += ", ...";
    throw Error(ErrorCode::kMissingRatings,
                std::to_string(missing.size()) + " record(s) lack teacher_rating: " + ids);
  }

  std::map<std::string, StatsAccumulator> per_dataset;
  StatsAccumulator all;
  for (const auto& record : records) {
    const size_t tokens = tokenizer(record.text);
    per_dataset[record.dataset].Add(record, tokens);
    all.Add(record, tokens);
  }

  std::vector<DatasetStats> out;
  for (const auto& [dataset, acc] : per_dataset) out.push_back(acc.Finish(dataset));
  std::stable_sort(out.begin(), out.end(),
                   [](const DatasetStats& a, const DatasetStats& b) {
                     return a.mean_score > b.mean_score;
                   });
  out.push_back(all.Finish(std::string(kAllDatasets)));
  return out;
}

std::string RenderStatsTable(const std::vector<DatasetStats>& stats) {
  std::string out =
      "| Dataset | Avg tokens | S | % Priv. |\n"
      "|---|---:|---:|---:|\n";
  char buffer[256];
  for (const auto& row : stats) {
    std::snprintf(buffer, sizeof(buffer), "| %s | %.0f | %.2f | %.1f |\n",
                  row.dataset.c_str(), row.avg_tokens, row.mean_score, row.pct_private);
    out += buffer;
  }
  return out;
}

}  // namespace privdistill
