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

#ifndef PRIVDISTILL_BASELINE_MODEL_H_
#define PRIVDISTILL_BASELINE_MODEL_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "privdistill/corpus.h"
#include "privdistill/rating.h"
#include "privdistill/scorer.h"

namespace privdistill {

// Sorted by index, no duplicate indices.
using SparseVector = std::vector<std::pair<uint32_t, double>>;

// Flat five-class linear model over hashed n-gram features.
struct BaselineModel {
  uint32_t feature_dim = 1u << 16;  // power of two
  std::vector<int> ngram_orders = {1, 2};  // word n-gram orders
  int char_ngram = 3;                      // 0 disables character n-grams
  uint64_t seed = 0;
  // weights[c * feature_dim + j]
  std::vector<double> weights;
  ClassDistribution bias{};

  // Throws Error(kInvalidArgument).
  void Validate() const;

  // Zero weights with the current shape.
  void Reset();

  friend bool operator==(const BaselineModel&, const BaselineModel&) = default;
};

// Lowercased word n-grams (orders from the model) and character n-grams over
// the space-joined words, hashed into feature_dim buckets, L2-normalized.
// Words are maximal runs of ASCII alphanumerics and non-ASCII bytes.
SparseVector Featurize(std::string_view text, const BaselineModel& model);

// Softmax over the five class scores.
ClassDistribution PredictDistribution(const BaselineModel& model,
                                      const SparseVector& features);

// rating = argmax (ties -> lower class).
std::vector<ScoredText> Predict(const BaselineModel& model,
                                std::span<const std::string> texts);

struct TrainingExample {
  SparseVector features;
  int label = 0;  // zero-based class index
};

// Dense gradient of TrainingObjective(); same layout as the model.
struct ModelGradient {
  std::vector<double> weights;
  ClassDistribution bias{};
};

// Mean cross-entropy over `examples` plus (l2 / 2) * ||weights||^2.
// Fills `gradient` when non-null.
double TrainingObjective(const BaselineModel& model,
                         std::span<const TrainingExample> examples, double l2,
                         ModelGradient* gradient = nullptr);

struct TrainConfig {
  int epochs = 10;
  double learning_rate = 0.5;  // epoch e uses learning_rate / (1 + e)
  double l2 = 1e-6;
  uint64_t seed = 0;
  uint32_t feature_dim = 1u << 16;
  std::vector<int> ngram_orders = {1, 2};
  int char_ngram = 3;
};

struct TrainingSummary {
  std::vector<double> train_objective;  // after each epoch
  std::vector<double> val_macro_f1;     // after each epoch; empty without val
  int best_epoch = 0;                   // zero-based
};

// Plain SGD on TrainingObjective with a per-epoch seeded shuffle. After every
// epoch the validation macro F1 is measured and the best epoch's weights
// (earliest on ties) are returned; without validation data the last epoch
// wins. Single-threaded and bitwise reproducible for a fixed config.
//
// Throws EmptyTrainingSet, UnlabeledRecord.
BaselineModel TrainBaseline(const std::vector<TextRecord>& train,
                            const std::vector<TextRecord>& val,
                            const TrainConfig& config,
                            TrainingSummary* summary = nullptr);

// Versioned little-endian binary. Load throws FileUnreadable / FormatError.
std::string SerializeModel(const BaselineModel& model);
BaselineModel DeserializeModel(std::string_view bytes);
void SaveModel(const BaselineModel& model, const std::string& path);
BaselineModel LoadModel(const std::string& path);

class BaselineScorer : public Scorer {
 public:
  explicit BaselineScorer(std::shared_ptr<const BaselineModel> model)
      : model_(std::move(model)) {}

  std::vector<ScoredText> ScoreBatch(std::span<const std::string> texts) override {
    return Predict(*model_, texts);
  }

 private:
  std::shared_ptr<const BaselineModel> model_;
};

}  // namespace privdistill

#endif  // PRIVDISTILL_BASELINE_MODEL_H_
