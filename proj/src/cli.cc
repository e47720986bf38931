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

#include "privdistill/cli.h"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "privdistill/agreement.h"
#include "privdistill/baseline_model.h"
#include "privdistill/clf_metrics.h"
#include "privdistill/corpus.h"
#include "privdistill/deid.h"
#include "privdistill/error.h"
#include "privdistill/random.h"
#include "privdistill/scorer.h"
#include "privdistill/tabular_io.h"
#include "privdistill/teacher.h"
#include "privdistill/text_util.h"
#include "privdistill/transport.h"

namespace privdistill::cli {
namespace {

using nlohmann::json;

struct GlobalOptions {
  uint64_t seed = 0;
  std::string out;
};

struct IngestOptions {
  std::vector<std::string> inputs;
  std::vector<std::string> datasets;
  std::string format = "lines";
  size_t sample = 0;
  std::string exclude;
  std::string hashes_out;
};

struct AnnotateCliOptions {
  std::string corpus;
  std::string results;
  TeacherConfig teacher;
  int backoff_ms = 500;
};

struct StatsOptions {
  std::string corpus;
  std::string tokenizer = "whitespace";
};

struct SplitOptions {
  std::string corpus;
  std::vector<double> fractions = {0.9, 0.05, 0.05};
};

struct TrainOptions {
  std::string corpus;
  std::string summary;
  int epochs = 10;
  double lr = 0.5;
  double l2 = 1e-6;
  int feature_bits = 16;
  int char_ngram = 3;
  std::vector<int> ngram_orders = {1, 2};
};

struct EvalOptions {
  std::string predictions;
  std::string corpus;
  std::string model;
  std::string scorer = "baseline";
  std::string split = "test";
  std::string predictions_out;
  size_t batch_size = 64;
};

struct AgreementOptions {
  std::string matrix;
  std::string model;
  std::string metric;
};

struct DeidOptions {
  std::string docs;
  std::string scorer = "baseline";
  std::string model;
  double fraction = 0.3;
  size_t batch_size = 64;
};

struct ReportOptions {
  std::string stats;
  std::string clf;
  std::string deid;
};

// Context shared by all subcommand handlers.
struct Context {
  GlobalOptions global;
  std::string command;
  std::string config_hash;
  std::ostream& out;
  std::ostream& err;
};

std::string UtcTimestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

json Provenance(const Context& ctx) {
  return json{{"tool", "privdistill"},
              {"version", std::string(kToolVersion)},
              {"command", ctx.command},
              {"config_hash", ctx.config_hash},
              {"seed", ctx.global.seed},
              {"timestamp", UtcTimestamp()}};
}

std::string ProvenanceLine(const Context& ctx) {
  return json{{std::string(kProvenanceKey), Provenance(ctx)}}.dump() + "\n";
}

void Emit(const Context& ctx, const std::string& contents) {
  if (ctx.global.out.empty()) {
    ctx.out << contents;
  } else {
    WriteFile(ctx.global.out, contents);
  }
}

void EmitJsonl(const Context& ctx, const std::string& jsonl) {
  Emit(ctx, ProvenanceLine(ctx) + jsonl);
}

// JSON documents carry provenance as a top-level member.
void EmitJson(const Context& ctx, json document) {
  document["provenance"] = Provenance(ctx);
  Emit(ctx, document.dump(2) + "\n");
}

std::vector<TextRecord> LoadCorpus(const std::string& path) {
  try {
    return LoadRecordsJsonl(ReadFile(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kFormatError) {
      throw Error(ErrorCode::kFormatError, path + ": " + e.what());
    }
    throw;
  }
}

std::unique_ptr<Scorer> MakeScorer(const std::string& spec, const std::string& model_path,
                                   size_t batch_size) {
  if (spec == "baseline") {
    if (model_path.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "--scorer baseline requires --model");
    }
    return std::make_unique<BaselineScorer>(
        std::make_shared<const BaselineModel>(LoadModel(model_path)));
  }
  constexpr std::string_view kRemote = "remote:";
  if (spec.rfind(kRemote, 0) == 0 && spec.size() > kRemote.size()) {
    return std::make_unique<RemoteScorer>(spec.substr(kRemote.size()), batch_size,
                                          std::make_shared<HttplibTransport>());
  }
  throw Error(ErrorCode::kInvalidArgument,
              "--scorer must be 'baseline' or 'remote:<url>', got '" + spec + "'");
}

int RunIngest(const Context& ctx, const IngestOptions& opt) {
  if (opt.inputs.size() != opt.datasets.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "give one --dataset tag per --input (" + std::to_string(opt.inputs.size()) +
                    " inputs, " + std::to_string(opt.datasets.size()) + " tags)");
  }
  const InputFormat format = ParseInputFormat(opt.format);
  std::unordered_set<std::string> exclude;
  if (!opt.exclude.empty()) exclude = ParseExclusionList(ReadFile(opt.exclude));

  std::vector<TextRecord> all;
  std::unordered_set<std::string> ids;
  for (size_t i = 0; i < opt.inputs.size(); ++i) {
    IngestResult result = Ingest(opt.inputs[i], opt.datasets[i], format);
    ctx.err << "ingest: " << opt.inputs[i] << ": " << result.records.size() << " records";
    if (result.dropped_empty > 0) {
      ctx.err << ", dropped " << result.dropped_empty << " empty text(s)";
    }
    ctx.err << "\n";
    std::vector<TextRecord> records = std::move(result.records);
    if (opt.sample > 0) {
      records = SampleExcluding(records, opt.sample, exclude, MixSeed(ctx.global.seed, i));
    } else if (!exclude.empty()) {
      std::erase_if(records, [&](const TextRecord& r) {
        return exclude.contains(NormalizedTextHash(r.text));
      });
    }
    for (auto& record : records) {
      if (!ids.insert(record.id).second) {
        throw Error(ErrorCode::kFormatError, "duplicate id across inputs: " + record.id);
      }
      all.push_back(std::move(record));
    }
  }
  if (all.empty()) throw Error(ErrorCode::kEmptyCorpus, "no records left after exclusion");
  if (!opt.hashes_out.empty()) {
    std::string hashes;
    for (const auto& record : all) hashes += NormalizedTextHash(record.text) + "\n";
    WriteFile(opt.hashes_out, hashes);
  }
  EmitJsonl(ctx, RecordsToJsonl(all));
  return kExitOk;
}

int RunAnnotate(const Context& ctx, AnnotateCliOptions opt) {
  opt.teacher.backoff_base = std::chrono::milliseconds(opt.backoff_ms);
  opt.teacher.backoff_max = std::max(opt.teacher.backoff_max, opt.teacher.backoff_base);
  auto records = LoadCorpus(opt.corpus);
  HttplibTransport transport;
  AnnotationCache cache(opt.teacher.cache_path);
  const AnnotationRun run = AnnotateBatch(records, opt.teacher, transport, cache);

  size_t ok = 0, parse_failed = 0, transport_failed = 0;
  for (const auto& r : run.results) {
    switch (r.status) {
      case AnnotationStatus::kOk: ++ok; break;
      case AnnotationStatus::kParseFailed: ++parse_failed; break;
      case AnnotationStatus::kTransportFailed: ++transport_failed; break;
    }
  }
  ctx.err << "annotate: " << ok << " ok, " << parse_failed << " parse_failed, "
          << transport_failed << " transport_failed; " << run.cache_hits
          << " cache hit(s), " << run.network_requests << " request(s)\n";
  if (!opt.results.empty()) {
    WriteFile(opt.results, ProvenanceLine(ctx) + ResultsToJsonl(run.results));
  }
  EmitJsonl(ctx, RecordsToJsonl(ApplyAnnotations(std::move(records), run.results)));
  return kExitOk;
}

int RunStats(const Context& ctx, const StatsOptions& opt) {
  if (opt.tokenizer != "whitespace") {
    throw Error(ErrorCode::kInvalidArgument,
                "only the whitespace tokenizer is available from the command line");
  }
  const auto stats = ComputeStats(LoadCorpus(opt.corpus));
  json rows = json::array();
  for (const auto& s : stats) rows.push_back(ToJson(s));
  EmitJson(ctx, json{{"stats", rows}, {"tokenizer", opt.tokenizer}});
  if (!ctx.global.out.empty()) ctx.out << RenderStatsTable(stats);
  return kExitOk;
}

int RunSplit(const Context& ctx, const SplitOptions& opt) {
  if (opt.fractions.size() != 3) {
    throw Error(ErrorCode::kBadFractions, "--fractions takes train,val,test");
  }
  auto records = AssignSplits(LoadCorpus(opt.corpus),
                              {opt.fractions[0], opt.fractions[1], opt.fractions[2]},
                              ctx.global.seed);
  size_t sizes[3] = {0, 0, 0};
  for (const auto& r : records) ++sizes[static_cast<int>(*r.split)];
  ctx.err << "split: train " << sizes[0] << ", val " << sizes[1] << ", test " << sizes[2]
          << "\n";
  EmitJsonl(ctx, RecordsToJsonl(records));
  return kExitOk;
}

std::vector<TextRecord> Select(const std::vector<TextRecord>& records, Split split) {
  std::vector<TextRecord> out;
  for (const auto& r : records) {
    if (r.split == split) out.push_back(r);
  }
  return out;
}

int RunTrain(const Context& ctx, const TrainOptions& opt) {
  if (ctx.global.out.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "train-baseline needs --out for the model file");
  }
  if (opt.feature_bits < 1 || opt.feature_bits > 28) {
    throw Error(ErrorCode::kInvalidArgument, "--feature-bits must be in 1..28");
  }
  const auto records = LoadCorpus(opt.corpus);
  TrainConfig config;
  config.epochs = opt.epochs;
  config.learning_rate = opt.lr;
  config.l2 = opt.l2;
  config.seed = ctx.global.seed;
  config.feature_dim = 1u << opt.feature_bits;
  config.char_ngram = opt.char_ngram;
  config.ngram_orders = opt.ngram_orders;

  const auto train = Select(records, Split::kTrain);
  const auto val = Select(records, Split::kVal);
  TrainingSummary summary;
  const BaselineModel model = TrainBaseline(train, val, config, &summary);
  SaveModel(model, ctx.global.out);
  ctx.err << "train-baseline: " << train.size() << " train / " << val.size()
          << " val records, best epoch " << summary.best_epoch + 1 << " of " << opt.epochs
          << "\n";
  if (!opt.summary.empty()) {
    json doc{{"train_objective", summary.train_objective},
             {"val_macro_f1", summary.val_macro_f1},
             {"best_epoch", summary.best_epoch + 1},
             {"model", ctx.global.out},
             {"provenance", Provenance(ctx)}};
    WriteFile(opt.summary, doc.dump(2) + "\n");
  }
  return kExitOk;
}

int RunEvalClf(const Context& ctx, const EvalOptions& opt) {
  std::vector<PrivacyRating> gold;
  std::vector<PrivacyRating> pred;
  std::string predictions_jsonl;
  if (!opt.predictions.empty()) {
    ForEachJsonLine(ReadFile(opt.predictions), [&](size_t line, const json& object) {
      try {
        gold.emplace_back(object.at("gold").get<int>());
        pred.emplace_back(object.at("pred").get<int>());
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kFormatError,
                    opt.predictions + ": line " + std::to_string(line) + ": " + e.what());
      }
    });
  } else {
    if (opt.corpus.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "eval-clf needs --predictions or --corpus");
    }
    auto records = LoadCorpus(opt.corpus);
    if (opt.split != "all") records = Select(records, ParseSplit(opt.split));
    std::vector<std::string> texts;
    for (const auto& r : records) {
      if (!r.teacher_rating) {
        throw Error(ErrorCode::kMissingRatings, "record " + r.id + " has no teacher_rating");
      }
      texts.push_back(r.text);
      gold.push_back(*r.teacher_rating);
    }
    auto scorer = MakeScorer(opt.scorer, opt.model, opt.batch_size);
    const auto scored = scorer->ScoreBatch(texts);
    for (size_t i = 0; i < scored.size(); ++i) {
      pred.push_back(scored[i].rating);
      predictions_jsonl += json{{"id", records[i].id},
                                {"gold", gold[i].value()},
                                {"pred", scored[i].rating.value()}}
                               .dump() +
                           "\n";
    }
  }
  const MetricReport report = Evaluate(gold, pred);
  ClassShares shares{};
  for (const auto& g : gold) shares[g.index()] += 1.0 / static_cast<double>(gold.size());
  const MetricReport majority = MajorityBaseline(shares);
  const MetricReport random = RandomBaseline(shares);
  if (!opt.predictions_out.empty() && !predictions_jsonl.empty()) {
    WriteFile(opt.predictions_out, ProvenanceLine(ctx) + predictions_jsonl);
  }
  const std::string table = RenderMetricTable(
      {{"model", report}, {"Majority (expected)", majority}, {"Random (expected)", random}});
  EmitJson(ctx, json{{"model", ToJson(report)},
                     {"baselines", {{"majority", ToJson(majority)}, {"random", ToJson(random)}}},
                     {"gold_distribution", shares},
                     {"table", table}});
  if (!ctx.global.out.empty()) ctx.out << table;
  return kExitOk;
}

int RunAgreement(const Context& ctx, const AgreementOptions& opt) {
  const RatingMatrix humans = ParseRatingMatrixCsv(ReadFile(opt.matrix));
  if (opt.model.empty()) {
    const AlphaMetric metric = ParseAlphaMetric(opt.metric.empty() ? "ordinal" : opt.metric);
    const AlphaResult result = KrippendorffAlpha(humans, metric);
    EmitJson(ctx, ToJson(result));
    ctx.err << "agreement: alpha = " << result.alpha << " (" << AlphaMetricName(metric)
            << ")\n";
    return kExitOk;
  }
  const AlphaMetric metric = ParseAlphaMetric(opt.metric.empty() ? "interval" : opt.metric);
  const auto model = ParseItemValuesCsv(ReadFile(opt.model));
  const AlphaResult vs_avg = AlphaVsReference(model, AverageRatings(humans), metric);
  const PairwiseAgreement pairwise = PairwiseAlphaSuite(model, humans, metric);
  json doc{{"metric", std::string(AlphaMetricName(metric))},
           {"vs_human_avg", ToJson(vs_avg)},
           {"pairwise", ToJson(pairwise)}};
  try {
    doc["inter_human"] = ToJson(KrippendorffAlpha(humans, metric));
  } catch (const Error& e) {
    doc["inter_human"] = json{{"error", e.what()}};
  }
  for (const auto& s : pairwise.skipped) {
    ctx.err << "agreement: skipped annotator " << s.rater_id << ": " << s.reason << "\n";
  }
  ctx.err << "agreement: vs human avg alpha = " << vs_avg.alpha << ", pairwise "
          << pairwise.mean << " (+/- " << pairwise.std << ") ("
          << AlphaMetricName(metric) << ")\n";
  EmitJson(ctx, doc);
  return kExitOk;
}

int RunDeid(const Context& ctx, const DeidOptions& opt) {
  const auto docs = ParseStandoffDocs(ReadFile(opt.docs));
  auto scorer = MakeScorer(opt.scorer, opt.model, opt.batch_size);
  const auto reports =
      EvaluateConditions(docs, *scorer, opt.fraction, ctx.global.seed, opt.batch_size);
  json rows = json::array();
  for (const auto& r : reports) rows.push_back(ToJson(r));
  const std::string table = RenderDeidTable(reports, opt.fraction);
  EmitJson(ctx, json{{"conditions", rows},
                     {"documents", docs.size()},
                     {"random_fraction", opt.fraction},
                     {"table", table}});
  if (!ctx.global.out.empty()) ctx.out << table;
  return kExitOk;
}

json ReadJsonDocument(const std::string& path) {
  const std::string content = ReadFile(path);
  json doc = json::parse(content, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::kFormatError, path + ": not a JSON object");
  }
  return doc;
}

int RunReport(const Context& ctx, const ReportOptions& opt) {
  if (opt.stats.empty() && opt.clf.empty() && opt.deid.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "report needs --stats, --clf and/or --deid");
  }
  std::string md = "<!-- " + Provenance(ctx).dump() + " -->\n";
  try {
    if (!opt.stats.empty()) {
      std::vector<DatasetStats> stats;
      for (const auto& row : ReadJsonDocument(opt.stats).at("stats")) {
        stats.push_back(DatasetStatsFromJson(row));
      }
      md += "\n## Corpus statistics\n\n" + RenderStatsTable(stats);
    }
    if (!opt.clf.empty()) {
      const json doc = ReadJsonDocument(opt.clf);
      md += "\n## Classification\n\n" + doc.at("table").get<std::string>();
    }
    if (!opt.deid.empty()) {
      const json doc = ReadJsonDocument(opt.deid);
      md += "\n## De-identification\n\n" + doc.at("table").get<std::string>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("report input: ") + e.what());
  }
  Emit(ctx, md);
  return kExitOk;
}

int ExitCodeFor(const Error& e) {
  ErrorCategory category = ErrorCategoryOf(e.code());
  if (e.cause()) {
    const ErrorCategory cause = ErrorCategoryOf(*e.cause());
    if (cause == ErrorCategory::kEndpoint) category = cause;
  }
  switch (category) {
    case ErrorCategory::kUsage: return kExitUsage;
    case ErrorCategory::kData: return kExitData;
    case ErrorCategory::kEndpoint: return kExitEndpoint;
  }
  return kExitData;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Privacy-sensitivity distillation and evaluation toolkit", "privdistill"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.set_config("--config", "", "Flat key = value config file (# comments); flags win");
  app.require_subcommand(1);
  app.fallthrough();
  app.failure_message(CLI::FailureMessage::help);

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--out", global.out, "Primary output path (default: stdout)");

  IngestOptions ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Read raw datasets into a JSONL corpus");
  ingest_cmd->add_option("--input", ingest.inputs, "Raw dataset file (repeatable)")->required();
  ingest_cmd->add_option("--dataset", ingest.datasets, "Dataset tag per --input")->required();
  ingest_cmd->add_option("--format", ingest.format, "jsonl | csv | lines")->capture_default_str();
  ingest_cmd->add_option("--sample", ingest.sample, "Records to sample per input (0 = all)");
  ingest_cmd->add_option("--exclude", ingest.exclude, "Normalized-text hashes to exclude");
  ingest_cmd->add_option("--hashes-out", ingest.hashes_out,
                         "Write normalized-text hashes of the output records");

  AnnotateCliOptions annotate;
  auto* annotate_cmd = app.add_subcommand("annotate", "Rate a corpus with the teacher endpoint");
  annotate_cmd->add_option("--corpus", annotate.corpus, "JSONL corpus")->required();
  annotate_cmd->add_option("--endpoint", annotate.teacher.endpoint_url,
                           "Chat-completion URL")->required();
  annotate_cmd->add_option("--model", annotate.teacher.model_name, "Teacher model name")
      ->required();
  annotate_cmd->add_option("--cache", annotate.teacher.cache_path, "Annotation cache (JSONL)");
  annotate_cmd->add_option("--results", annotate.results, "Write the per-record results log");
  annotate_cmd->add_option("--temperature", annotate.teacher.temperature)->capture_default_str();
  annotate_cmd->add_option("--max-retries", annotate.teacher.max_retries)->capture_default_str();
  annotate_cmd->add_option("--parallelism", annotate.teacher.parallelism)->capture_default_str();
  annotate_cmd->add_option("--api-key-env", annotate.teacher.api_key_env)->capture_default_str();
  annotate_cmd->add_option("--response-path", annotate.teacher.response_path,
                           "JSON pointer to the assistant text")->capture_default_str();
  annotate_cmd->add_option("--votes", annotate.teacher.votes)->capture_default_str();
  annotate_cmd->add_option("--backoff-ms", annotate.backoff_ms)->capture_default_str();

  StatsOptions stats;
  auto* stats_cmd = app.add_subcommand("stats", "Per-dataset privacy statistics");
  stats_cmd->add_option("--corpus", stats.corpus, "Rated JSONL corpus")->required();
  stats_cmd->add_option("--tokenizer", stats.tokenizer)->capture_default_str();

  SplitOptions split;
  auto* split_cmd = app.add_subcommand("split", "Assign train/val/test splits");
  split_cmd->add_option("--corpus", split.corpus, "JSONL corpus")->required();
  split_cmd->add_option("--fractions", split.fractions, "train,val,test")
      ->delimiter(',')
      ->expected(3)
      ->capture_default_str();

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train-baseline", "Train the hashed n-gram scorer");
  train_cmd->add_option("--corpus", train.corpus, "Split, rated JSONL corpus")->required();
  train_cmd->add_option("--summary", train.summary, "Write per-epoch training summary JSON");
  train_cmd->add_option("--epochs", train.epochs)->capture_default_str();
  train_cmd->add_option("--lr", train.lr)->capture_default_str();
  train_cmd->add_option("--l2", train.l2)->capture_default_str();
  train_cmd->add_option("--feature-bits", train.feature_bits)->capture_default_str();
  train_cmd->add_option("--char-ngram", train.char_ngram)->capture_default_str();
  train_cmd->add_option("--ngram-orders", train.ngram_orders)->delimiter(',')
      ->capture_default_str();

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval-clf", "Classification metrics and baselines");
  eval_cmd->add_option("--predictions", eval.predictions, "JSONL {id, gold, pred}");
  eval_cmd->add_option("--corpus", eval.corpus, "Rated, split JSONL corpus");
  eval_cmd->add_option("--model", eval.model, "Baseline model file");
  eval_cmd->add_option("--scorer", eval.scorer, "baseline | remote:<url>")->capture_default_str();
  eval_cmd->add_option("--split", eval.split, "train | val | test | all")->capture_default_str();
  eval_cmd->add_option("--predictions-out", eval.predictions_out);
  eval_cmd->add_option("--batch-size", eval.batch_size)->capture_default_str();

  AgreementOptions agreement;
  auto* agreement_cmd = app.add_subcommand("agreement", "Krippendorff's alpha");
  agreement_cmd->add_option("--matrix", agreement.matrix, "CSV item_id,rater_id,value")
      ->required();
  agreement_cmd->add_option("--model", agreement.model, "CSV item_id,value of model ratings");
  agreement_cmd->add_option("--metric", agreement.metric,
                            "nominal | ordinal | interval (default ordinal, interval with "
                            "--model)");

  DeidOptions deid;
  auto* deid_cmd = app.add_subcommand("deid", "Masking experiment over standoff documents");
  deid_cmd->add_option("--docs", deid.docs, "Standoff JSON/JSONL documents")->required();
  deid_cmd->add_option("--scorer", deid.scorer, "baseline | remote:<url>")->capture_default_str();
  deid_cmd->add_option("--model", deid.model, "Baseline model file");
  deid_cmd->add_option("--fraction", deid.fraction, "Random-mask word fraction")
      ->capture_default_str();
  deid_cmd->add_option("--batch-size", deid.batch_size)->capture_default_str();

  ReportOptions report;
  auto* report_cmd = app.add_subcommand("report", "Render Markdown tables from JSON outputs");
  report_cmd->add_option("--stats", report.stats, "Output of `stats`");
  report_cmd->add_option("--clf", report.clf, "Output of `eval-clf`");
  report_cmd->add_option("--deid", report.deid, "Output of `deid`");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Context ctx{global, "", HexU64(Fnv1a64(app.config_to_str(true, false))), out, err};
  try {
    if (*ingest_cmd) {
      ctx.command = "ingest";
      return RunIngest(ctx, ingest);
    }
    if (*annotate_cmd) {
      ctx.command = "annotate";
      return RunAnnotate(ctx, annotate);
    }
    if (*stats_cmd) {
      ctx.command = "stats";
      return RunStats(ctx, stats);
    }
    if (*split_cmd) {
      ctx.command = "split";
      return RunSplit(ctx, split);
    }
    if (*train_cmd) {
      ctx.command = "train-baseline";
      return RunTrain(ctx, train);
    }
    if (*eval_cmd) {
      ctx.command = "eval-clf";
      return RunEvalClf(ctx, eval);
    }
    if (*agreement_cmd) {
      ctx.command = "agreement";
      return RunAgreement(ctx, agreement);
    }
    if (*deid_cmd) {
      ctx.command = "deid";
      return RunDeid(ctx, deid);
    }
    if (*report_cmd) {
      ctx.command = "report";
      return RunReport(ctx, report);
    }
  } catch (const Error& e) {
    err << "privdistill " << ctx.command << ": " << e.what() << "\n";
    return ExitCodeFor(e);
  } catch (const std::exception& e) {
    err << "privdistill " << ctx.command << ": " << e.what() << "\n";
    return kExitData;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace privdistill::cli
