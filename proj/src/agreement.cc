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

#include "privdistill/agreement.h"

#include <cmath>
#include <unordered_map>

#include "privdistill/error.h"
#include "privdistill/tabular_io.h"
#include "privdistill/text_util.h"

namespace privdistill {

using nlohmann::json;

std::string_view AlphaMetricName(AlphaMetric metric) {
  switch (metric) {
    case AlphaMetric::kNominal: return "nominal";
    case AlphaMetric::kOrdinal: return "ordinal";
    case AlphaMetric::kInterval: return "interval";
  }
  return "interval";
}

AlphaMetric ParseAlphaMetric(std::string_view name) {
  if (name == "nominal") return AlphaMetric::kNominal;
  if (name == "ordinal") return AlphaMetric::kOrdinal;
  if (name == "interval") return AlphaMetric::kInterval;
  throw Error(ErrorCode::kInvalidArgument, "unknown metric '" + std::string(name) + "'");
}

void RatingMatrix::CheckShape() const {
  if (values.size() != item_ids.size()) {
    throw Error(ErrorCode::kFormatError, "row count does not match item ids");
  }
  for (const auto& row : values) {
    if (row.size() != rater_ids.size()) {
      throw Error(ErrorCode::kFormatError, "column count does not match rater ids");
    }
  }
}

namespace {

std::optional<double> ParseValue(const std::string& field, size_t line) {
  const auto trimmed = Trim(field);
  if (trimmed.empty() || trimmed == "NA" || trimmed == "na") return std::nullopt;
  const std::string text(trimmed);
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || !std::isfinite(value)) {
    throw Error(ErrorCode::kFormatError,
                "line " + std::to_string(line) + ": bad value '" + text + "'");
  }
  return value;
}

void ExpectHeader(const CsvRow& row, const std::vector<std::string>& expected) {
  std::vector<std::string> got;
  for (const auto& field : row.fields) got.emplace_back(Trim(field));
  if (got != expected) {
    std::string want;
    for (size_t i = 0; i < expected.size(); ++i) {
      if (i) want += ",";
      want += expected[i];
    }
    throw Error(ErrorCode::kFormatError, "expected CSV header \"" + want + "\"");
  }
}

}  // namespace

RatingMatrix ParseRatingMatrixCsv(std::string_view content) {
  const auto rows = ParseCsv(content);
  if (rows.empty()) throw Error(ErrorCode::kFormatError, "empty rating matrix file");
  ExpectHeader(rows.front(), {"item_id", "rater_id", "value"});

  RatingMatrix matrix;
  std::unordered_map<std::string, size_t> item_index;
  std::unordered_map<std::string, size_t> rater_index;
  struct Cell {
    size_t item, rater;
    std::optional<double> value;
    size_t line;
  };
  std::vector<Cell> cells;
  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    if (f.size() != 3) {
      throw Error(ErrorCode::kFormatError,
                  "line " + std::to_string(rows[r].line_number) + ": expected 3 fields");
    }
    const std::string item(Trim(f[0]));
    const std::string rater(Trim(f[1]));
    auto [it, new_item] = item_index.emplace(item, matrix.item_ids.size());
    if (new_item) matrix.item_ids.push_back(item);
    auto [rt, new_rater] = rater_index.emplace(rater, matrix.rater_ids.size());
    if (new_rater) matrix.rater_ids.push_back(rater);
    cells.push_back({it->second, rt->second, ParseValue(f[2], rows[r].line_number),
                     rows[r].line_number});
  }
  matrix.values.assign(matrix.item_ids.size(),
                       std::vector<std::optional<double>>(matrix.rater_ids.size()));
  std::vector<std::vector<bool>> seen(matrix.item_ids.size(),
                                      std::vector<bool>(matrix.rater_ids.size()));
  for (const auto& cell : cells) {
    if (seen[cell.item][cell.rater]) {
      throw Error(ErrorCode::kFormatError,
                  "line " + std::to_string(cell.line) + ": duplicate cell (" +
                      matrix.item_ids[cell.item] + ", " +
                      matrix.rater_ids[cell.rater] + ")");
    }
    seen[cell.item][cell.rater] = true;
    matrix.values[cell.item][cell.rater] = cell.value;
  }
  return matrix;
}

std::map<std::string, double> ParseItemValuesCsv(std::string_view content) {
  const auto rows = ParseCsv(content);
  if (rows.empty()) throw Error(ErrorCode::kFormatError, "empty item value file");
  ExpectHeader(rows.front(), {"item_id", "value"});
  std::map<std::string, double> out;
  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const size_t line = rows[r].line_number;
    if (f.size() != 2) {
      throw Error(ErrorCode::kFormatError,
                  "line " + std::to_string(line) + ": expected 2 fields");
    }
    const auto value = ParseValue(f[1], line);
    if (!value) continue;
    if (!out.emplace(std::string(Trim(f[0])), *value).second) {
      throw Error(ErrorCode::kFormatError,
                  "line " + std::to_string(line) + ": duplicate item id");
    }
  }
  return out;
}

json ToJson(const AlphaResult& result) {
  return json{{"alpha", result.alpha},
              {"metric", std::string(AlphaMetricName(result.metric))},
              {"n_pairable", result.n_pairable},
              {"Do", result.observed_disagreement},
              {"De", result.expected_disagreement}};
}

AlphaResult KrippendorffAlpha(const RatingMatrix& matrix, AlphaMetric metric) {
  matrix.CheckShape();

  // Distinct values in ascending order.
  std::map<double, size_t> value_index;
  for (const auto& row : matrix.values) {
    size_t present = 0;
    for (const auto& v : row) present += v.has_value();
    if (present < 2) continue;
    for (const auto& v : row) {
      if (v) value_index.emplace(*v, 0);
    }
  }
  std::vector<double> values;
  for (auto& [value, index] : value_index) {
    index = values.size();
    values.push_back(value);
  }
  const size_t k = values.size();

  // Coincidence matrix.
  std::vector<std::vector<double>> coincidence(k, std::vector<double>(k, 0.0));
  std::vector<double> counts(k);
  for (const auto& row : matrix.values) {
    double m = 0;
    for (const auto& v : row) m += v.has_value();
    if (m < 2) continue;
    std::fill(counts.begin(), counts.end(), 0.0);
    for (const auto& v : row) {
      if (v) counts[value_index.at(*v)] += 1.0;
    }
    for (size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (size_t d = 0; d < k; ++d) {
        const double pairs = counts[c] * (counts[d] - (c == d ? 1.0 : 0.0));
        if (pairs > 0) coincidence[c][d] += pairs / (m - 1.0);
      }
    }
  }

  std::vector<double> marginals(k, 0.0);
  double n = 0.0;
  for (size_t c = 0; c < k; ++c) {
    for (size_t d = 0; d < k; ++d) marginals[c] += coincidence[c][d];
    n += marginals[c];
  }
  if (n < 2.0 - 1e-9) {
    throw Error(ErrorCode::kTooFewValues, "fewer than two pairable values");
  }

  // Squared differences.
  std::vector<std::vector<double>> delta2(k, std::vector<double>(k, 0.0));
  for (size_t c = 0; c < k; ++c) {
    for (size_t d = c + 1; d < k; ++d) {
      double diff = 0.0;
      switch (metric) {
        case AlphaMetric::kNominal:
          diff = 1.0;
          break;
        case AlphaMetric::kInterval:
          diff = (values[c] - values[d]) * (values[c] - values[d]);
          break;
        case AlphaMetric::kOrdinal: {
          double span = 0.0;
          for (size_t g = c; g <= d; ++g) span += marginals[g];
          span -= (marginals[c] + marginals[d]) / 2.0;
          diff = span * span;
          break;
        }
      }
      delta2[c][d] = delta2[d][c] = diff;
    }
  }

  double observed = 0.0;
  double expected = 0.0;
  for (size_t c = 0; c < k; ++c) {
    for (size_t d = 0; d < k; ++d) {
      if (c == d) continue;
      observed += coincidence[c][d] * delta2[c][d];
      expected += marginals[c] * marginals[d] * delta2[c][d];
    }
  }
  observed /= n;
  expected /= n * (n - 1.0);
  if (expected <= 0.0) {
    throw Error(ErrorCode::kZeroExpectedDisagreement,
                "all pairable values are identical; alpha is undefined");
  }

  AlphaResult result;
  result.metric = metric;
  result.n_pairable = static_cast<size_t>(std::llround(n));
  result.observed_disagreement = observed;
  result.expected_disagreement = expected;
  result.alpha = 1.0 - observed / expected;
  return result;
}

AlphaResult AlphaVsReference(const std::map<std::string, double>& model,
                             const std::map<std::string, double>& reference,
                             AlphaMetric metric) {
  RatingMatrix matrix;
  matrix.rater_ids = {"model", "reference"};
  for (const auto& [id, value] : model) {
    const auto it = reference.find(id);
    if (it == reference.end()) continue;
    matrix.item_ids.push_back(id);
    matrix.values.push_back({value, it->second});
  }
  if (matrix.item_ids.size() < 2) {
    throw Error(ErrorCode::kNoOverlap,
                "model and reference share " + std::to_string(matrix.item_ids.size()) +
                    " item(s); at least 2 are required");
  }
  return KrippendorffAlpha(matrix, metric);
}

std::map<std::string, double> AverageRatings(const RatingMatrix& matrix) {
  matrix.CheckShape();
  std::map<std::string, double> out;
  for (size_t i = 0; i < matrix.item_ids.size(); ++i) {
    double sum = 0.0;
    int count = 0;
    for (const auto& v : matrix.values[i]) {
      if (!v) continue;
      sum += *v;
      ++count;
    }
    if (count > 0) out[matrix.item_ids[i]] = sum / count;
  }
  return out;
}

json ToJson(const PairwiseAgreement& result) {
  json skipped = json::array();
  for (const auto& s : result.skipped) {
    skipped.push_back(json{{"rater_id", s.rater_id}, {"reason", s.reason}});
  }
  return json{{"per_rater", result.per_rater},
              {"mean", result.mean},
              {"std", result.std},
              {"skipped", skipped}};
}

PairwiseAgreement PairwiseAlphaSuite(const std::map<std::string, double>& model,
                                     const RatingMatrix& humans, AlphaMetric metric) {
  humans.CheckShape();
  PairwiseAgreement out;
  for (size_t r = 0; r < humans.rater_ids.size(); ++r) {
    std::map<std::string, double> annotator;
    for (size_t i = 0; i < humans.item_ids.size(); ++i) {
      if (humans.values[i][r]) annotator[humans.item_ids[i]] = *humans.values[i][r];
    }
    const std::string& rater = humans.rater_ids[r];
    try {
      out.per_rater[rater] = AlphaVsReference(model, annotator, metric).alpha;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kNoOverlap) {
        out.skipped.push_back({rater, "fewer than 2 items shared with the model"});
      } else if (e.code() == ErrorCode::kZeroExpectedDisagreement) {
        out.skipped.push_back({rater, "no expected disagreement (all values equal)"});
      } else {
        throw;
      }
    }
  }
  if (out.per_rater.empty()) {
    throw Error(ErrorCode::kNoEligibleAnnotators,
                "no annotator shares at least 2 rated items with the model");
  }
  double sum = 0.0;
  for (const auto& [rater, alpha] : out.per_rater) sum += alpha;
  out.mean = sum / static_cast<double>(out.per_rater.size());
  double sq = 0.0;
  for (const auto& [rater, alpha] : out.per_rater) sq += (alpha - out.mean) * (alpha - out.mean);
  out.std = std::sqrt(sq / static_cast<double>(out.per_rater.size()));
  return out;
}

}  // namespace privdistill
