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

#include "privdistill/baseline_model.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <map>

#include "privdistill/clf_metrics.h"
#include "privdistill/error.h"
#include "privdistill/random.h"
#include "privdistill/text_util.h"

namespace privdistill {

static_assert(std::endian::native == std::endian::little,
              "model serialization assumes a little-endian host");

void BaselineModel::Validate() const {
  if (feature_dim == 0 || !std::has_single_bit(feature_dim)) {
    throw Error(ErrorCode::kInvalidArgument, "feature_dim must be a power of two");
  }
  for (int order : ngram_orders) {
    if (order < 1 || order > 8) {
      throw Error(ErrorCode::kInvalidArgument, "word n-gram orders must be in 1..8");
    }
  }
  if (char_ngram < 0 || char_ngram > 16) {
    throw Error(ErrorCode::kInvalidArgument, "char_ngram must be in 0..16");
  }
  if (!weights.empty() && weights.size() != size_t{kNumClasses} * feature_dim) {
    throw Error(ErrorCode::kInvalidArgument, "weights do not match feature_dim");
  }
  for (double w : weights) {
    if (!std::isfinite(w)) throw Error(ErrorCode::kInvalidArgument, "non-finite weight");
  }
  for (double b : bias) {
    if (!std::isfinite(b)) throw Error(ErrorCode::kInvalidArgument, "non-finite bias");
  }
}

void BaselineModel::Reset() {
  weights.assign(size_t{kNumClasses} * feature_dim, 0.0);
  bias.fill(0.0);
}

namespace {

bool IsWordByte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         c >= 0x80;
}

std::vector<std::string> LowercaseWords(std::string_view text) {
  std::vector<std::string> words;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !IsWordByte(static_cast<unsigned char>(text[i]))) ++i;
    const size_t begin = i;
    while (i < text.size() && IsWordByte(static_cast<unsigned char>(text[i]))) ++i;
    if (i > begin) words.push_back(AsciiLower(text.substr(begin, i - begin)));
  }
  return words;
}

}  // namespace

SparseVector Featurize(std::string_view text, const BaselineModel& model) {
  const auto words = LowercaseWords(text);
  if (words.empty()) return {};
  const uint32_t mask = model.feature_dim - 1;
  std::map<uint32_t, double> counts;

  for (int order : model.ngram_orders) {
    const uint64_t basis = Fnv1a64("w" + std::to_string(order));
    for (size_t i = 0; i + order <= words.size(); ++i) {
      std::string gram = words[i];
      for (int k = 1; k < order; ++k) {
        gram.push_back(' ');
        gram += words[i + k];
      }
      counts[static_cast<uint32_t>(Fnv1a64(gram, basis)) & mask] += 1.0;
    }
  }
  if (model.char_ngram > 0) {
    std::string joined = " ";
    for (const auto& w : words) {
      joined += w;
      joined.push_back(' ');
    }
    const uint64_t basis = Fnv1a64("c" + std::to_string(model.char_ngram));
    const size_t n = static_cast<size_t>(model.char_ngram);
    for (size_t i = 0; i + n <= joined.size(); ++i) {
      counts[static_cast<uint32_t>(Fnv1a64(std::string_view(joined).substr(i, n), basis)) &
             mask] += 1.0;
    }
  }

  double norm = 0.0;
  for (const auto& [index, value] : counts) norm += value * value;
  norm = std::sqrt(norm);
  SparseVector out;
  out.reserve(counts.size());
  for (const auto& [index, value] : counts) out.emplace_back(index, value / norm);
  return out;
}

namespace {

ClassDistribution Logits(const BaselineModel& model, const SparseVector& x,
                         double scale = 1.0) {
  ClassDistribution z = model.bias;
  for (int c = 0; c < kNumClasses; ++c) {
    const double* row = model.weights.data() + size_t{static_cast<size_t>(c)} * model.feature_dim;
    double dot = 0.0;
    for (const auto& [j, v] : x) dot += row[j] * v;
    z[c] += scale * dot;
  }
  return z;
}

ClassDistribution Softmax(const ClassDistribution& z) {
  const double top = *std::max_element(z.begin(), z.end());
  ClassDistribution p{};
  double sum = 0.0;
  for (int c = 0; c < kNumClasses; ++c) {
    p[c] = std::exp(z[c] - top);
    sum += p[c];
  }
  for (double& v : p) v /= sum;
  return p;
}

}  // namespace

ClassDistribution PredictDistribution(const BaselineModel& model,
                                      const SparseVector& features) {
  return Softmax(Logits(model, features));
}

std::vector<ScoredText> Predict(const BaselineModel& model,
                                std::span<const std::string> texts) {
  std::vector<ScoredText> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    const auto probs = PredictDistribution(model, Featurize(text, model));
    out.push_back({PrivacyRating::FromIndex(ArgmaxLowest(probs)), probs});
  }
  return out;
}

double TrainingObjective(const BaselineModel& model,
                         std::span<const TrainingExample> examples, double l2,
                         ModelGradient* gradient) {
  if (gradient != nullptr) {
    gradient->weights.assign(model.weights.size(), 0.0);
    gradient->bias.fill(0.0);
  }
  double loss = 0.0;
  const double inv_n = examples.empty() ? 0.0 : 1.0 / static_cast<double>(examples.size());
  for (const auto& example : examples) {
    const ClassDistribution z = Logits(model, example.features);
    const double top = *std::max_element(z.begin(), z.end());
    double log_sum = 0.0;
    for (double v : z) log_sum += std::exp(v - top);
    log_sum = top + std::log(log_sum);
    loss += (log_sum - z[example.label]) * inv_n;
    if (gradient == nullptr) continue;
    for (int c = 0; c < kNumClasses; ++c) {
      const double g = (std::exp(z[c] - log_sum) - (c == example.label ? 1.0 : 0.0)) * inv_n;
      gradient->bias[c] += g;
      double* row = gradient->weights.data() + size_t{static_cast<size_t>(c)} * model.feature_dim;
      for (const auto& [j, v] : example.features) row[j] += g * v;
    }
  }
  double sq = 0.0;
  for (double w : model.weights) sq += w * w;
  loss += 0.5 * l2 * sq;
  if (gradient != nullptr) {
    for (size_t i = 0; i < model.weights.size(); ++i) {
      gradient->weights[i] += l2 * model.weights[i];
    }
  }
  return loss;
}

namespace {

std::vector<TrainingExample> MakeExamples(const std::vector<TextRecord>& records,
                                          const BaselineModel& model) {
  std::vector<TrainingExample> examples;
  examples.reserve(records.size());
  for (const auto& record : records) {
    if (!record.teacher_rating) {
      throw Error(ErrorCode::kUnlabeledRecord, "record " + record.id + " has no rating");
    }
    examples.push_back({Featurize(record.text, model), record.teacher_rating->index()});
  }
  return examples;
}

double MacroF1On(const BaselineModel& model, const std::vector<TrainingExample>& examples) {
  ConfusionMatrix confusion;
  for (const auto& example : examples) {
    const int pred = ArgmaxLowest(PredictDistribution(model, example.features));
    ++confusion.counts[example.label][pred];
  }
  return ReportFromConfusion(confusion).macro_f1;
}

}  // namespace

BaselineModel TrainBaseline(const std::vector<TextRecord>& train,
                            const std::vector<TextRecord>& val,
                            const TrainConfig& config, TrainingSummary* summary) {
  if (train.empty()) throw Error(ErrorCode::kEmptyTrainingSet, "no training records");
  if (config.epochs < 1) throw Error(ErrorCode::kInvalidArgument, "epochs must be >= 1");
  if (!(config.learning_rate > 0.0) || !(config.l2 >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "learning rate must be > 0 and l2 >= 0");
  }

  BaselineModel model;
  model.feature_dim = config.feature_dim;
  model.ngram_orders = config.ngram_orders;
  model.char_ngram = config.char_ngram;
  model.seed = config.seed;
  model.Validate();
  model.Reset();

  const auto train_examples = MakeExamples(train, model);
  const auto val_examples = MakeExamples(val, model);

  TrainingSummary local;
  TrainingSummary& stats = summary != nullptr ? *summary : local;
  stats = TrainingSummary{};

  BaselineModel best = model;
  double best_f1 = -1.0;
  std::vector<size_t> order(train_examples.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  // Weights are kept as scale * stored so that L2 decay costs O(1) per step.
  double scale = 1.0;
  const auto fold_scale = [&] {
    if (scale == 1.0) return;
    for (double& w : model.weights) w *= scale;
    scale = 1.0;
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng rng(MixSeed(config.seed, static_cast<uint64_t>(epoch)));
    rng.Shuffle(order);
    const double lr = config.learning_rate / (1.0 + epoch);
    for (size_t i : order) {
      const auto& example = train_examples[i];
      const ClassDistribution p = Softmax(Logits(model, example.features, scale));
      scale *= 1.0 - lr * config.l2;
      for (int c = 0; c < kNumClasses; ++c) {
        const double g = p[c] - (c == example.label ? 1.0 : 0.0);
        model.bias[c] -= lr * g;
        double* row = model.weights.data() + size_t{static_cast<size_t>(c)} * model.feature_dim;
        const double step = lr * g / scale;
        for (const auto& [j, v] : example.features) row[j] -= step * v;
      }
      if (scale < 1e-6) fold_scale();
    }
    fold_scale();

    stats.train_objective.push_back(TrainingObjective(model, train_examples, config.l2));
    if (val_examples.empty()) {
      best = model;
      stats.best_epoch = epoch;
      continue;
    }
    const double f1 = MacroF1On(model, val_examples);
    stats.val_macro_f1.push_back(f1);
    if (f1 > best_f1) {
      best_f1 = f1;
      best = model;
      stats.best_epoch = epoch;
    }
  }
  return best;
}

namespace {

constexpr char kMagic[4] = {'P', 'D', 'B', 'M'};
constexpr uint32_t kFormatVersion = 1;

template <typename T>
void Put(std::string& out, const T& value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.append(bytes, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T Get() {
    if (pos_ + sizeof(T) > bytes_.size()) {
      throw Error(ErrorCode::kFormatError, "model file truncated");
    }
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  size_t pos_ = 0;
};

}  // namespace

std::string SerializeModel(const BaselineModel& model) {
  model.Validate();
  std::string out(kMagic, sizeof(kMagic));
  Put(out, kFormatVersion);
  Put(out, model.feature_dim);
  Put(out, static_cast<uint32_t>(model.ngram_orders.size()));
  for (int order : model.ngram_orders) Put(out, static_cast<int32_t>(order));
  Put(out, static_cast<int32_t>(model.char_ngram));
  Put(out, model.seed);
  for (double b : model.bias) Put(out, b);
  Put(out, static_cast<uint64_t>(model.weights.size()));
  out.append(reinterpret_cast<const char*>(model.weights.data()),
             model.weights.size() * sizeof(double));
  return out;
}

BaselineModel DeserializeModel(std::string_view bytes) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::kFormatError, "not a baseline model file");
  }
  Reader reader(bytes.substr(sizeof(kMagic)));
  const auto version = reader.Get<uint32_t>();
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kFormatError,
                "unsupported model format version " + std::to_string(version));
  }
  BaselineModel model;
  model.feature_dim = reader.Get<uint32_t>();
  const auto n_orders = reader.Get<uint32_t>();
  if (n_orders > 8) throw Error(ErrorCode::kFormatError, "too many n-gram orders");
  model.ngram_orders.clear();
  for (uint32_t i = 0; i < n_orders; ++i) model.ngram_orders.push_back(reader.Get<int32_t>());
  model.char_ngram = reader.Get<int32_t>();
  model.seed = reader.Get<uint64_t>();
  for (double& b : model.bias) b = reader.Get<double>();
  const auto n_weights = reader.Get<uint64_t>();
  if (n_weights != uint64_t{kNumClasses} * model.feature_dim) {
    throw Error(ErrorCode::kFormatError, "weight count does not match feature_dim");
  }
  model.weights.resize(n_weights);
  for (double& w : model.weights) w = reader.Get<double>();
  if (!reader.AtEnd()) throw Error(ErrorCode::kFormatError, "trailing bytes in model file");
  try {
    model.Validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kFormatError, e.what());
  }
  return model;
}

void SaveModel(const BaselineModel& model, const std::string& path) {
  WriteFile(path, SerializeModel(model));
}

BaselineModel LoadModel(const std::string& path) {
  return DeserializeModel(ReadFile(path));
}

}  // namespace privdistill
