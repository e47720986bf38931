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

#ifndef PRIVDISTILL_TEACHER_H_
#define PRIVDISTILL_TEACHER_H_

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "privdistill/corpus.h"
#include "privdistill/rating.h"
#include "privdistill/transport.h"

namespace privdistill {

// Bumped whenever the prompt template bytes change; part of every cache key.
inline constexpr std::string_view kPromptTemplateVersion = "privacy-rating-v1";

// Appended to the prompt when a response carried no usable rating.
inline constexpr std::string_view kClarifyingSuffix =
    "\n\nRespond with a single digit from 1 to 5 and nothing else.";

// Fills the fixed rating template with `text`. Throws Error(kEmptyText).
std::string BuildPrompt(std::string_view text);

// First standalone integer in `raw` (digits not glued to letters, digits or a
// decimal point). Throws Error(kOutOfRange) carrying the value when that
// integer is outside 1..5, Error(kNoRatingFound) when there is none.
PrivacyRating ParseRating(std::string_view raw);

struct TeacherConfig {
  std::string endpoint_url;
  std::string model_name;
  double temperature = 0.0;
  int max_retries = 3;
  int parallelism = 4;
  std::string cache_path;  // empty: in-memory only
  std::string api_key_env = "TEACHER_API_KEY";
  // JSON pointer to the assistant text in the endpoint's response.
  std::string response_path = "/choices/0/message/content";
  // Independent queries per text; the majority rating wins (ties -> lower).
  int votes = 1;
  std::chrono::milliseconds backoff_base{500};
  std::chrono::milliseconds backoff_max{30000};

  // Throws Error(kInvalidArgument).
  void Validate() const;
};

enum class AnnotationStatus { kOk, kParseFailed, kTransportFailed };

std::string_view AnnotationStatusName(AnnotationStatus status);

struct AnnotationResult {
  std::string record_id;
  std::optional<PrivacyRating> rating;
  std::string raw_response;
  int attempts = 1;
  AnnotationStatus status = AnnotationStatus::kTransportFailed;

  friend bool operator==(const AnnotationResult&, const AnnotationResult&) = default;
};

nlohmann::json ToJson(const AnnotationResult& result);
AnnotationResult AnnotationResultFromJson(const nlohmann::json& object);
std::string ResultsToJsonl(const std::vector<AnnotationResult>& results);

// Persistent JSONL store of finished annotations keyed by
// (record id, prompt hash, model, template version). Concurrent lookups,
// serialized appends; every append is flushed so an interrupted run keeps
// everything finished so far. A truncated trailing line is ignored on load.
class AnnotationCache {
 public:
  // Empty path: memory only.
  explicit AnnotationCache(std::string path);

  static std::string Key(std::string_view record_id, std::string_view prompt,
                         std::string_view model_name);

  std::optional<AnnotationResult> Lookup(const std::string& key) const;
  void Insert(const std::string& key, const AnnotationResult& result);
  size_t size() const;

 private:
  std::string path_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, AnnotationResult> entries_;
};

struct AnnotateOptions {
  // Called between retries instead of std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;
  // Checked before each record is started; set to stop early.
  const std::atomic<bool>* cancel = nullptr;
  // Environment lookup for the API key; defaults to std::getenv.
  std::function<std::optional<std::string>(const std::string&)> getenv;
};

struct AnnotationRun {
  // Input order. Records not started because of cancellation are absent.
  std::vector<AnnotationResult> results;
  size_t cache_hits = 0;
  size_t network_requests = 0;
  bool interrupted = false;
};

// Rates every record through the teacher endpoint with bounded parallelism.
// Transport failures (no response, non-2xx, body without text at
// response_path) back off exponentially; a response without a valid rating is
// re-asked once with kClarifyingSuffix. Total attempts never exceed
// max_retries + 1. ok and parse_failed results are cached; transport
// failures are not, so a later run retries them.
//
// Throws Error(kEndpointUnreachable) only when requests were made, none got a
// usable response, and nothing came from the cache.
AnnotationRun AnnotateBatch(const std::vector<TextRecord>& records,
                            const TeacherConfig& config, Transport& transport,
                            AnnotationCache& cache,
                            const AnnotateOptions& options = {});

// Copies ok ratings onto matching records (by id).
std::vector<TextRecord> ApplyAnnotations(
    std::vector<TextRecord> records, const std::vector<AnnotationResult>& results);

}  // namespace privdistill

#endif  // PRIVDISTILL_TEACHER_H_
