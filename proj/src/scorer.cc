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

#include "privdistill/scorer.h"

#include <cmath>

#include "privdistill/error.h"

namespace privdistill {

using nlohmann::json;

json ScoreRequestJson(std::span<const std::string> texts) {
  return json{{"texts", json(std::vector<std::string>(texts.begin(), texts.end()))}};
}

json ScoreResponseJson(std::span<const ScoredText> scored) {
  json ratings = json::array();
  json probs = json::array();
  bool all_probs = true;
  for (const auto& s : scored) {
    ratings.push_back(s.rating.value());
    if (s.probs) {
      probs.push_back(*s.probs);
    } else {
      all_probs = false;
    }
  }
  json out{{"ratings", ratings}};
  if (all_probs) out["probs"] = probs;
  return out;
}

namespace {

[[noreturn]] void Protocol(const std::string& message) {
  throw Error(ErrorCode::kProtocolError, message);
}

}  // namespace

std::vector<ScoredText> ParseScoreResponse(const std::string& body,
                                           size_t expected_count) {
  const json parsed = json::parse(body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) Protocol("response is not a JSON object");
  const auto ratings = parsed.find("ratings");
  if (ratings == parsed.end() || !ratings->is_array()) Protocol("missing \"ratings\" array");
  if (ratings->size() != expected_count) {
    Protocol("expected " + std::to_string(expected_count) + " ratings, got " +
             std::to_string(ratings->size()));
  }
  const auto probs = parsed.find("probs");
  const bool has_probs = probs != parsed.end() && !probs->is_null();
  if (has_probs && (!probs->is_array() || probs->size() != expected_count)) {
    Protocol("\"probs\" must be an array with one row per text");
  }

  std::vector<ScoredText> out;
  out.reserve(expected_count);
  for (size_t i = 0; i < expected_count; ++i) {
    const json& r = (*ratings)[i];
    if (!r.is_number_integer()) Protocol("rating " + std::to_string(i) + " is not an integer");
    ScoredText scored{PrivacyRating(r.get<int>()), std::nullopt};
    if (has_probs) {
      const json& row = (*probs)[i];
      if (!row.is_array() || row.size() != kNumClasses) {
        Protocol("probs row " + std::to_string(i) + " must hold 5 numbers");
      }
      ClassDistribution dist{};
      double sum = 0.0;
      for (int c = 0; c < kNumClasses; ++c) {
        if (!row[c].is_number()) Protocol("probs row " + std::to_string(i) + " not numeric");
        dist[c] = row[c].get<double>();
        if (!(dist[c] >= 0.0)) Protocol("negative probability in row " + std::to_string(i));
        sum += dist[c];
      }
      if (std::abs(sum - 1.0) > 1e-6) {
        Protocol("probs row " + std::to_string(i) + " sums to " + std::to_string(sum));
      }
      if (dist[scored.rating.index()] < dist[ArgmaxLowest(dist)] - 1e-9) {
        Protocol("rating " + std::to_string(i) + " is not the argmax of its probs");
      }
      scored.probs = dist;
    }
    out.push_back(scored);
  }
  return out;
}

std::string ScoreUrl(const std::string& endpoint) {
  std::string base = endpoint;
  while (!base.empty() && base.back() == '/') base.pop_back();
  if (base.size() >= 6 && base.compare(base.size() - 6, 6, "/score") == 0) return base;
  return base + "/score";
}

std::vector<ScoredText> RemoteScore(const std::string& endpoint,
                                    std::span<const std::string> texts,
                                    size_t batch_size, Transport& transport) {
  if (batch_size == 0) throw Error(ErrorCode::kInvalidArgument, "batch_size must be >= 1");
  const std::string url = ScoreUrl(endpoint);
  std::vector<ScoredText> out;
  out.reserve(texts.size());
  for (size_t begin = 0; begin < texts.size(); begin += batch_size) {
    const auto chunk = texts.subspan(begin, std::min(batch_size, texts.size() - begin));
    HttpResponse response;
    try {
      response = transport.Post(HttpRequest{url, ScoreRequestJson(chunk).dump(), {}});
    } catch (const TransportError& e) {
      throw Error(ErrorCode::kEndpointUnreachable, e.what());
    }
    if (response.status < 200 || response.status >= 300) {
      Protocol("HTTP " + std::to_string(response.status) + " from " + url + ": " +
               response.body);
    }
    auto scored = ParseScoreResponse(response.body, chunk.size());
    out.insert(out.end(), scored.begin(), scored.end());
  }
  return out;
}

RemoteScorer::RemoteScorer(std::string endpoint, size_t batch_size,
                           std::shared_ptr<Transport> transport)
    : endpoint_(std::move(endpoint)),
      batch_size_(batch_size),
      transport_(std::move(transport)) {}

std::vector<ScoredText> RemoteScorer::ScoreBatch(std::span<const std::string> texts) {
  return RemoteScore(endpoint_, texts, batch_size_, *transport_);
}

}  // namespace privdistill
