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

#ifndef PRIVDISTILL_SCORER_H_
#define PRIVDISTILL_SCORER_H_

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "privdistill/rating.h"
#include "privdistill/transport.h"

namespace privdistill {

struct ScoredText {
  PrivacyRating rating{1};
  // When present: nonnegative, sums to 1, and rating is its argmax.
  std::optional<ClassDistribution> probs;
};

// Maps a batch of texts to ratings, one output per input, in order.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::vector<ScoredText> ScoreBatch(std::span<const std::string> texts) = 0;
};

// Wire format of POST /score, shared with the encoder service:
//   request  {"texts": [str, ...]}
//   response {"ratings": [int, ...], "probs": [[p1..p5], ...]}
// "probs" may be omitted by servers that only return labels.
nlohmann::json ScoreRequestJson(std::span<const std::string> texts);
nlohmann::json ScoreResponseJson(std::span<const ScoredText> scored);

// Validates a /score response body against `expected_count` texts.
// Throws ProtocolError on schema mismatch and OutOfRange on ratings outside
// 1..5.
std::vector<ScoredText> ParseScoreResponse(const std::string& body,
                                           size_t expected_count);

// Appends "/score" unless the endpoint already names it.
std::string ScoreUrl(const std::string& endpoint);

// Sends texts in chunks of at most batch_size and reassembles outputs in input
// order. Throws EndpointUnreachable when no HTTP response arrives,
// ProtocolError on non-2xx statuses or schema mismatch, OutOfRange.
std::vector<ScoredText> RemoteScore(const std::string& endpoint,
                                    std::span<const std::string> texts,
                                    size_t batch_size, Transport& transport);

class RemoteScorer : public Scorer {
 public:
  RemoteScorer(std::string endpoint, size_t batch_size,
               std::shared_ptr<Transport> transport);

  std::vector<ScoredText> ScoreBatch(std::span<const std::string> texts) override;

 private:
  std::string endpoint_;
  size_t batch_size_;
  std::shared_ptr<Transport> transport_;
};

}  // namespace privdistill

#endif  // PRIVDISTILL_SCORER_H_
