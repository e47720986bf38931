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

#include "privdistill/clf_metrics.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "privdistill/error.h"

namespace privdistill {

using nlohmann::json;

uint64_t ConfusionMatrix::Total() const {
  uint64_t total = 0;
  for (const auto& row : counts) {
    for (uint64_t c : row) total += c;
  }
  return total;
}

json ToJson(const MetricReport& report) {
  json confusion = json::array();
  for (const auto& row : report.confusion.counts) confusion.push_back(row);
  return json{{"count", report.count},
              {"accuracy", report.accuracy},
              {"macro_f1", report.macro_f1},
              {"per_class_f1", report.per_class_f1},
              {"mae", report.mae},
              {"adjacent_error_share", report.adjacent_error_share},
              {"confusion", confusion}};
}

namespace {

double F1(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

double MeanOf(const std::array<double, kNumClasses>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / kNumClasses;
}

}  // namespace

MetricReport ReportFromConfusion(const ConfusionMatrix& confusion) {
  MetricReport report;
  report.confusion = confusion;
  report.count = confusion.Total();
  if (report.count == 0) throw Error(ErrorCode::kEmptyInput, "no predictions");
  const double total = static_cast<double>(report.count);

  uint64_t correct = 0;
  uint64_t adjacent = 0;
  double abs_error = 0.0;
  std::array<uint64_t, kNumClasses> gold_totals{};
  std::array<uint64_t, kNumClasses> pred_totals{};
  for (int g = 0; g < kNumClasses; ++g) {
    for (int p = 0; p < kNumClasses; ++p) {
      const uint64_t n = confusion.counts[g][p];
      gold_totals[g] += n;
      pred_totals[p] += n;
      if (g == p) correct += n;
      if (std::abs(g - p) == 1) adjacent += n;
      abs_error += static_cast<double>(n) * std::abs(g - p);
    }
  }
  report.accuracy = static_cast<double>(correct) / total;
  report.mae = abs_error / total;
  const uint64_t errors = report.count - correct;
  report.adjacent_error_share =
      errors > 0 ? static_cast<double>(adjacent) / static_cast<double>(errors) : 0.0;
  for (int c = 0; c < kNumClasses; ++c) {
    const double tp = static_cast<double>(confusion.counts[c][c]);
    const double precision = pred_totals[c] > 0 ? tp / pred_totals[c] : 0.0;
    const double recall = gold_totals[c] > 0 ? tp / gold_totals[c] : 0.0;
    report.per_class_f1[c] = F1(precision, recall);
  }
  report.macro_f1 = MeanOf(report.per_class_f1);
  return report;
}

MetricReport Evaluate(std::span<const PrivacyRating> gold,
                      std::span<const PrivacyRating> pred) {
  if (gold.size() != pred.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(gold.size()) + " gold vs " +
                    std::to_string(pred.size()) + " predicted labels");
  }
  if (gold.empty()) throw Error(ErrorCode::kEmptyInput, "no labels");
  ConfusionMatrix confusion;
  for (size_t i = 0; i < gold.size(); ++i) {
    ++confusion.counts[gold[i].index()][pred[i].index()];
  }
  return ReportFromConfusion(confusion);
}

ClassShares NormalizeShares(const ClassShares& shares) {
  double sum = 0.0;
  for (double s : shares) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw Error(ErrorCode::kBadDistribution, "class shares must be finite and >= 0");
    }
    sum += s;
  }
  if (std::abs(sum - 1.0) > 1e-3) {
    throw Error(ErrorCode::kBadDistribution,
                "class shares sum to " + std::to_string(sum) + ", expected 1");
  }
  ClassShares out = shares;
  for (double& s : out) s /= sum;
  return out;
}

MetricReport MajorityBaseline(const ClassShares& gold_distribution) {
  const ClassShares p = NormalizeShares(gold_distribution);
  const int majority = ArgmaxLowest(p);
  MetricReport report;
  report.accuracy = p[majority];
  // precision p, recall 1
  report.per_class_f1[majority] = 2.0 * p[majority] / (1.0 + p[majority]);
  report.macro_f1 = MeanOf(report.per_class_f1);
  double adjacent = 0.0;
  for (int c = 0; c < kNumClasses; ++c) {
    report.mae += p[c] * std::abs(c - majority);
    if (std::abs(c - majority) == 1) adjacent += p[c];
  }
  const double error = 1.0 - p[majority];
  report.adjacent_error_share = error > 0.0 ? adjacent / error : 0.0;
  return report;
}

MetricReport RandomBaseline(const ClassShares& gold_distribution) {
  const ClassShares p = NormalizeShares(gold_distribution);
  constexpr double kGuess = 1.0 / kNumClasses;
  MetricReport report;
  report.accuracy = kGuess;
  double adjacent = 0.0;
  for (int c = 0; c < kNumClasses; ++c) {
    // precision p_c, recall 0.2
    report.per_class_f1[c] = F1(p[c], kGuess);
    double mean_distance = 0.0;
    for (int k = 0; k < kNumClasses; ++k) {
      mean_distance += std::abs(c - k) * kGuess;
      if (std::abs(c - k) == 1) adjacent += p[c] * kGuess;
    }
    report.mae += p[c] * mean_distance;
  }
  report.macro_f1 = MeanOf(report.per_class_f1);
  report.adjacent_error_share = adjacent / (1.0 - kGuess);
  return report;
}

std::string RenderMetricTable(
    const std::vector<std::pair<std::string, MetricReport>>& rows) {
  std::string out =
      "| Model | Acc. | Macro F1 | MAE | C1 | C2 | C3 | C4 | C5 |\n"
      "|---|---:|---:|---:|---:|---:|---:|---:|---:|\n";
  char buffer[64];
  for (const auto& [name, report] : rows) {
    out += "| " + name + " | ";
    std::snprintf(buffer, sizeof(buffer), "%.1f | %.1f | %.2f |", 100 * report.accuracy,
                  100 * report.macro_f1, report.mae);
    out += buffer;
    for (double f1 : report.per_class_f1) {
      std::snprintf(buffer, sizeof(buffer), " %.1f |", 100 * f1);
      out += buffer;
    }
    out += "\n";
  }
  return out;
}

}  // namespace privdistill
