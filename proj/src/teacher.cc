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

#include "privdistill/teacher.h"

#include <algorithm>
#include <climits>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include "privdistill/error.h"
#include "privdistill/tabular_io.h"
#include "privdistill/text_util.h"

namespace privdistill {

using nlohmann::json;

namespace {

constexpr std::string_view kSlot = "{user_text}";

// Fixed template bytes; any edit must bump kPromptTemplateVersion.
constexpr std::string_view kPromptTemplate =
    "Provide a privacy rating scoring on how sensitive or private the "
    "user_text, for example including personal information or indirectly "
    "identifiable information.\n"
    "\n"
    "Give your answer on a scale of 1 to 5, where 1 means that the user_text "
    "is not sensitive or private at all, and 5 means that text contains highly "
    "sensitive or private information.\n"
    "\n"
    "Here is the scale you should use to build your answer:\n"
    "1: The user_text is harmless: completely free of any private or "
    "sensitive information, either direct or indirect identifiers.\n"
    "2: The user_text is mostly not private: may contain some indirect "
    "identifiers, but is mostly free of sensitive information.\n"
    "3: The user_text is somewhat private: contains some direct or indirect "
    "identifiers, and can be deemed somewhat personal information.\n"
    "4: The user_text is very private: contains several direct or indirect "
    "identifiers, and it is clear that this text contains personal "
    "information.\n"
    "5: The user_text is extremely private: contains highly sensitive "
    "information, such as direct personal identifiers, and the text is "
    "clearly something that should not be made public.\n"
    "\n"
    "user_text: {user_text}";

bool IsAsciiAlnum(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
bool IsAsciiDigit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::string BuildPrompt(std::string_view text) {
  if (Trim(text).empty()) throw Error(ErrorCode::kEmptyText, "text is empty");
  const size_t slot = kPromptTemplate.find(kSlot);
  std::string prompt;
  prompt.reserve(kPromptTemplate.size() + text.size());
  prompt += kPromptTemplate.substr(0, slot);
  prompt += text;
  prompt += kPromptTemplate.substr(slot + kSlot.size());
  return prompt;
}

PrivacyRating ParseRating(std::string_view raw) {
  size_t i = 0;
  while (i < raw.size()) {
    if (!IsAsciiDigit(raw[i])) {
      ++i;
      continue;
    }
    const size_t begin = i;
    while (i < raw.size() && IsAsciiDigit(raw[i])) ++i;
    const size_t end = i;

    const char before = begin > 0 ? raw[begin - 1] : ' ';
    const char after = end < raw.size() ? raw[end] : ' ';
    const bool glued_before = IsAsciiAlnum(before) || before == '_' || before == '.';
    const bool glued_after =
        IsAsciiAlnum(after) || after == '_' ||
        (after == '.' && end + 1 < raw.size() && IsAsciiDigit(raw[end + 1]));
    if (glued_before || glued_after) continue;

    const bool negative =
        before == '-' && (begin < 2 || !IsAsciiAlnum(raw[begin - 2]));
    long long value = LLONG_MAX;
    if (end - begin <= 18) value = std::stoll(std::string(raw.substr(begin, end - begin)));
    if (negative) value = -value;
    if (value < 1 || value > kNumClasses) {
      throw Error(ErrorCode::kOutOfRange,
                  "rating " + std::to_string(value) + " outside 1..5", value);
    }
    return PrivacyRating(static_cast<int>(value));
  }
  throw Error(ErrorCode::kNoRatingFound, "no integer in response");
}

void TeacherConfig::Validate() const {
  auto fail = [](const std::string& message) {
    throw Error(ErrorCode::kInvalidArgument, message);
  };
  if (parallelism < 1) fail("parallelism must be >= 1");
  if (max_retries < 0 || max_retries > 10) fail("max_retries must be in 0..10");
  if (!(temperature >= 0.0)) fail("temperature must be >= 0");
  if (votes < 1) fail("votes must be >= 1");
  if (model_name.empty()) fail("model name is required");
  if (backoff_base.count() < 0 || backoff_max < backoff_base) {
    fail("backoff must satisfy 0 <= base <= max");
  }
  if (!response_path.empty() && response_path.front() != '/') {
    fail("response_path must be a JSON pointer starting with '/'");
  }
}

std::string_view AnnotationStatusName(AnnotationStatus status) {
  switch (status) {
    case AnnotationStatus::kOk: return "ok";
    case AnnotationStatus::kParseFailed: return "parse_failed";
    case AnnotationStatus::kTransportFailed: return "transport_failed";
  }
  return "transport_failed";
}

namespace {

AnnotationStatus ParseStatus(const std::string& name) {
  if (name == "ok") return AnnotationStatus::kOk;
  if (name == "parse_failed") return AnnotationStatus::kParseFailed;
  if (name == "transport_failed") return AnnotationStatus::kTransportFailed;
  throw Error(ErrorCode::kFormatError, "unknown annotation status '" + name + "'");
}

}  // namespace

json ToJson(const AnnotationResult& result) {
  return json{{"record_id", result.record_id},
              {"rating", result.rating ? json(result.rating->value()) : json(nullptr)},
              {"raw_response", result.raw_response},
              {"attempts", result.attempts},
              {"status", std::string(AnnotationStatusName(result.status))}};
}

AnnotationResult AnnotationResultFromJson(const json& object) {
  AnnotationResult result;
  try {
    result.record_id = object.at("record_id").get<std::string>();
    if (!object.at("rating").is_null()) {
      result.rating = PrivacyRating(object["rating"].get<int>());
    }
    result.raw_response = object.at("raw_response").get<std::string>();
    result.attempts = object.at("attempts").get<int>();
    result.status = ParseStatus(object.at("status").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("annotation: ") + e.what());
  }
  return result;
}

std::string ResultsToJsonl(const std::vector<AnnotationResult>& results) {
  std::string out;
  for (const auto& result : results) {
    out += ToJson(result).dump();
    out.push_back('\n');
  }
  return out;
}

AnnotationCache::AnnotationCache(std::string path) : path_(std::move(path)) {
  if (path_.empty()) return;
  std::ifstream in(path_, std::ios::binary);
  if (!in) return;  // first run
  std::string line;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    json object = json::parse(line, nullptr, /*allow_exceptions=*/false);
    // An interrupted writer may leave a partial last line.
    if (object.is_discarded() || !object.is_object() || !object.contains("key")) {
      continue;
    }
    try {
      entries_.insert_or_assign(object["key"].get<std::string>(),
                                AnnotationResultFromJson(object));
    } catch (const Error&) {
      continue;
    }
  }
}

std::string AnnotationCache::Key(std::string_view record_id,
                                 std::string_view prompt,
                                 std::string_view model_name) {
  std::string material;
  material += kPromptTemplateVersion;
  material.push_back('\0');
  material += record_id;
  material.push_back('\0');
  material += HexU64(Fnv1a64(prompt));
  material.push_back('\0');
  material += model_name;
  return HexU64(Fnv1a64(material));
}

std::optional<AnnotationResult> AnnotationCache::Lookup(const std::string& key) const {
  std::shared_lock lock(mutex_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void AnnotationCache::Insert(const std::string& key, const AnnotationResult& result) {
  std::unique_lock lock(mutex_);
  entries_.insert_or_assign(key, result);
  if (path_.empty()) return;
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::kFileUnreadable, "cannot append to cache " + path_);
  json line = ToJson(result);
  line["key"] = key;
  out << line.dump() << '\n';
  out.flush();
}

size_t AnnotationCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

namespace {

struct QueryContext {
  const TeacherConfig& config;
  Transport& transport;
  const AnnotateOptions& options;
  std::vector<std::pair<std::string, std::string>> headers;
  std::atomic<size_t> requests{0};
  std::atomic<size_t> usable_responses{0};
};

// Outcome of a single attempt.
struct Attempt {
  enum Kind { kResponse, kRetryableFailure, kFatalFailure } kind;
  std::string text;  // assistant text, or diagnostic
};

Attempt QueryOnce(QueryContext& ctx, const std::string& prompt) {
  json body{{"model", ctx.config.model_name},
            {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
            {"temperature", ctx.config.temperature}};
  HttpRequest request{ctx.config.endpoint_url, body.dump(), ctx.headers};
  ++ctx.requests;
  HttpResponse response;
  try {
    response = ctx.transport.Post(request);
  } catch (const TransportError& e) {
    return {Attempt::kRetryableFailure, e.what()};
  }
  if (response.status < 200 || response.status >= 300) {
    const bool retryable = response.status == 408 || response.status == 429 ||
                           response.status >= 500;
    return {retryable ? Attempt::kRetryableFailure : Attempt::kFatalFailure,
            "HTTP " + std::to_string(response.status) + ": " + response.body};
  }
  const json parsed = json::parse(response.body, nullptr, false);
  if (parsed.is_discarded()) {
    return {Attempt::kRetryableFailure, "malformed response body: " + response.body};
  }
  const json::json_pointer pointer(ctx.config.response_path);
  if (!parsed.contains(pointer) || !parsed.at(pointer).is_string()) {
    return {Attempt::kRetryableFailure,
            "response has no text at " + ctx.config.response_path + ": " +
                response.body};
  }
  ++ctx.usable_responses;
  return {Attempt::kResponse, parsed.at(pointer).get<std::string>()};
}

// One vote: retries until a rating parses or the attempt budget runs out.
AnnotationResult QueryVote(QueryContext& ctx, const std::string& prompt,
                           const std::string& record_id) {
  const int budget = ctx.config.max_retries + 1;
  AnnotationResult result;
  result.record_id = record_id;
  result.attempts = 0;
  bool clarified = false;
  int backoff_step = 0;
  while (result.attempts < budget) {
    ++result.attempts;
    const std::string current =
        clarified ? prompt + std::string(kClarifyingSuffix) : prompt;
    const Attempt attempt = QueryOnce(ctx, current);
    if (attempt.kind != Attempt::kResponse) {
      result.status = AnnotationStatus::kTransportFailed;
      result.raw_response = attempt.text;
      if (attempt.kind == Attempt::kFatalFailure) break;
      if (result.attempts < budget) {
        auto delay = ctx.config.backoff_base * (int64_t{1} << std::min(backoff_step, 20));
        ++backoff_step;
        ctx.options.sleep(std::min<std::chrono::milliseconds>(delay, ctx.config.backoff_max));
      }
      continue;
    }
    result.raw_response = attempt.text;
    try {
      result.rating = ParseRating(attempt.text);
      result.status = AnnotationStatus::kOk;
      return result;
    } catch (const Error&) {
      result.status = AnnotationStatus::kParseFailed;
      if (clarified) break;
      clarified = true;
    }
  }
  result.rating.reset();
  return result;
}

AnnotationResult Annotate(QueryContext& ctx, const TextRecord& record,
                          const std::string& prompt) {
  if (ctx.config.votes == 1) return QueryVote(ctx, prompt, record.id);

  std::vector<AnnotationResult> votes;
  std::array<int, kNumClasses> tally{};
  int total_attempts = 0;
  for (int v = 0; v < ctx.config.votes; ++v) {
    votes.push_back(QueryVote(ctx, prompt, record.id));
    total_attempts += votes.back().attempts;
    if (votes.back().rating) ++tally[votes.back().rating->index()];
  }
  int best = -1;
  for (int c = 0; c < kNumClasses; ++c) {
    if (tally[c] > 0 && (best < 0 || tally[c] > tally[best])) best = c;
  }
  AnnotationResult result;
  if (best < 0) {
    result = votes.back();
  } else {
    result = *std::find_if(votes.begin(), votes.end(), [&](const AnnotationResult& r) {
      return r.rating && r.rating->index() == best;
    });
  }
  result.attempts = total_attempts;
  return result;
}

}  // namespace

AnnotationRun AnnotateBatch(const std::vector<TextRecord>& records,
                            const TeacherConfig& config, Transport& transport,
                            AnnotationCache& cache, const AnnotateOptions& options) {
  config.Validate();
  AnnotateOptions opts = options;
  if (!opts.sleep) {
    opts.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
  if (!opts.getenv) {
    opts.getenv = [](const std::string& name) -> std::optional<std::string> {
      const char* value = std::getenv(name.c_str());
      if (value == nullptr) return std::nullopt;
      return std::string(value);
    };
  }

  QueryContext ctx{config, transport, opts, {}};
  if (!config.api_key_env.empty()) {
    if (auto key = opts.getenv(config.api_key_env); key && !key->empty()) {
      ctx.headers.emplace_back("Authorization", "Bearer " + *key);
    }
  }

  std::vector<std::optional<AnnotationResult>> slots(records.size());
  std::atomic<size_t> next{0};
  std::atomic<size_t> cache_hits{0};
  std::atomic<bool> interrupted{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&] {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= records.size()) return;
      if (opts.cancel != nullptr && opts.cancel->load()) {
        interrupted = true;
        return;
      }
      try {
        const std::string prompt = BuildPrompt(records[i].text);
        const std::string key =
            AnnotationCache::Key(records[i].id, prompt, config.model_name);
        if (auto hit = cache.Lookup(key)) {
          ++cache_hits;
          hit->record_id = records[i].id;
          slots[i] = std::move(*hit);
          continue;
        }
        AnnotationResult result = Annotate(ctx, records[i], prompt);
        if (result.status != AnnotationStatus::kTransportFailed) {
          cache.Insert(key, result);
        }
        slots[i] = std::move(result);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        interrupted = true;
        return;
      }
    }
  };

  const size_t n_workers =
      std::min<size_t>(static_cast<size_t>(config.parallelism), std::max<size_t>(records.size(), 1));
  {
    std::vector<std::jthread> pool;
    for (size_t w = 0; w + 1 < n_workers; ++w) pool.emplace_back(worker);
    worker();
  }
  if (first_error) std::rethrow_exception(first_error);

  AnnotationRun run;
  run.cache_hits = cache_hits;
  run.network_requests = ctx.requests;
  run.interrupted = interrupted;
  for (auto& slot : slots) {
    if (slot) run.results.push_back(std::move(*slot));
  }
  if (run.network_requests > 0 && ctx.usable_responses == 0 && run.cache_hits == 0) {
    throw Error(ErrorCode::kEndpointUnreachable,
                "no usable response from " + config.endpoint_url + " after " +
                    std::to_string(run.network_requests) + " request(s)");
  }
  return run;
}

std::vector<TextRecord> ApplyAnnotations(std::vector<TextRecord> records,
                                         const std::vector<AnnotationResult>& results) {
  std::unordered_map<std::string, PrivacyRating> ratings;
  for (const auto& result : results) {
    if (result.status == AnnotationStatus::kOk && result.rating) {
      ratings.insert_or_assign(result.record_id, *result.rating);
    }
  }
  for (auto& record : records) {
    if (auto it = ratings.find(record.id); it != ratings.end()) {
      record.teacher_rating = it->second;
    }
  }
  return records;
}

}  // namespace privdistill
