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

#include "test_support.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

#include "httplib.h"
#include "json.hpp"
#include "privdistill/teacher.h"

namespace privdistill::testing {

using nlohmann::json;

TempDir::TempDir() {
  std::string pattern =
      (std::filesystem::temp_directory_path() / "privdistill-test-XXXXXX").string();
  if (mkdtemp(pattern.data()) == nullptr) std::abort();
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ignored;
  std::filesystem::remove_all(path_, ignored);
}

std::string ChatBody(std::string_view content) {
  return json{{"choices", json::array({json{{"message",
                                             json{{"role", "assistant"},
                                                  {"content", std::string(content)}}}}})}}
      .dump();
}

std::string UserTextFromPrompt(std::string_view prompt) {
  constexpr std::string_view kMarker = "\nuser_text: ";
  const size_t at = prompt.rfind(kMarker);
  if (at == std::string_view::npos) return "";
  std::string_view text = prompt.substr(at + kMarker.size());
  if (text.ends_with(kClarifyingSuffix)) text.remove_suffix(kClarifyingSuffix.size());
  return std::string(text);
}

std::string UserTextFromRequest(std::string_view body) {
  const json request = json::parse(body);
  return UserTextFromPrompt(request.at("messages").at(0).at("content").get<std::string>());
}

HttpResponse ScriptedTransport::Post(const HttpRequest& request) {
  const int now = ++in_flight_;
  int seen = max_in_flight_.load();
  while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
  }
  size_t index;
  {
    std::lock_guard lock(mutex_);
    index = requests_.size();
    requests_.push_back(request);
  }
  ++calls_;
  if (latency_.count() > 0) std::this_thread::sleep_for(latency_);
  struct Leave {
    std::atomic<int>& counter;
    ~Leave() { --counter; }
  } leave{in_flight_};
  return handler_(request, index);
}

std::vector<HttpRequest> ScriptedTransport::requests() const {
  std::lock_guard lock(mutex_);
  return requests_;
}

OracleAlpha BruteForceAlpha(const RatingMatrix& matrix, AlphaMetric metric) {
  std::vector<std::vector<double>> units;
  std::vector<double> pooled;
  for (const auto& row : matrix.values) {
    std::vector<double> unit;
    for (const auto& cell : row) {
      if (cell) unit.push_back(*cell);
    }
    if (unit.size() >= 2) {
      pooled.insert(pooled.end(), unit.begin(), unit.end());
      units.push_back(std::move(unit));
    }
  }
  OracleAlpha result;
  result.n = pooled.size();
  if (result.n < 2) {
    result.status = OracleAlpha::Status::kTooFewValues;
    return result;
  }
  std::map<double, double> freq;
  for (double v : pooled) freq[v] += 1.0;
  auto delta2 = [&](double c, double k) {
    if (c == k) return 0.0;
    switch (metric) {
      case AlphaMetric::kNominal:
        return 1.0;
      case AlphaMetric::kInterval:
        return (c - k) * (c - k);
      case AlphaMetric::kOrdinal: {
        const double lo = std::min(c, k);
        const double hi = std::max(c, k);
        double sum = 0.0;
        for (const auto& [g, count] : freq) {
          if (g >= lo && g <= hi) sum += count;
        }
        const double d = sum - (freq[c] + freq[k]) / 2.0;
        return d * d;
      }
    }
    return 0.0;
  };
  const double n = static_cast<double>(result.n);
  double observed = 0.0;
  for (const auto& unit : units) {
    const double weight = 1.0 / static_cast<double>(unit.size() - 1);
    for (size_t i = 0; i < unit.size(); ++i) {
      for (size_t j = 0; j < unit.size(); ++j) {
        if (i != j) observed += weight * delta2(unit[i], unit[j]);
      }
    }
  }
  double expected = 0.0;
  for (size_t i = 0; i < pooled.size(); ++i) {
    for (size_t j = 0; j < pooled.size(); ++j) {
      if (i != j) expected += delta2(pooled[i], pooled[j]);
    }
  }
  result.observed = observed / n;
  result.expected = expected / (n * (n - 1.0));
  if (result.expected <= 0.0) {
    result.status = OracleAlpha::Status::kZeroExpected;
    return result;
  }
  result.alpha = 1.0 - result.observed / result.expected;
  return result;
}

RatingMatrix RandomMatrix(Rng& rng, size_t max_items, size_t max_raters,
                          double missing_rate) {
  RatingMatrix m;
  const size_t items = 1 + rng.UniformBelow(max_items);
  const size_t raters = 1 + rng.UniformBelow(max_raters);
  for (size_t r = 0; r < raters; ++r) m.rater_ids.push_back("r" + std::to_string(r));
  for (size_t i = 0; i < items; ++i) {
    m.item_ids.push_back("i" + std::to_string(i));
    std::vector<std::optional<double>> row;
    for (size_t r = 0; r < raters; ++r) {
      if (rng.UniformUnit() < missing_rate) {
        row.push_back(std::nullopt);
      } else {
        row.push_back(static_cast<double>(1 + rng.UniformBelow(5)));
      }
    }
    m.values.push_back(std::move(row));
  }
  return m;
}

namespace {

const std::vector<std::string>& NeutralPhrases() {
  static const std::vector<std::string> phrases = {
      "nice weather today",
      "the meeting ran late again",
      "we talked about the new schedule",
      "dinner was pasta with a green salad",
      "the train was on time this morning",
      "my phone needs a new case",
      "is the report ready for review",
      "the garden looks great after the rain",
      "my number one tip is to read more",
      "the bus number 42 was crowded",
      "the library opens at 9 tomorrow",
      "i finally finished the puzzle",
  };
  return phrases;
}

const std::vector<std::string>& DirectMentions() {
  static const std::vector<std::string> mentions = {
      "Anna Berg",         "Lars Holm",      "Maria Quist",
      "SSN 123-45-6789",   "phone 555-0134", "anna.berg@example.com",
      "passport P8812733", "Jonas Lind",
  };
  return mentions;
}

const std::vector<std::string>& QuasiMentions() {
  static const std::vector<std::string> mentions = {
      "born in 1975",   "lives in Bergen", "works as a nurse", "aged 43",
      "from Tromso",    "divorced father", "drives a red Volvo",
  };
  return mentions;
}

const std::vector<std::string>& Fillers() {
  static const std::vector<std::string> fillers = {
      "I went to the market today.", "The meeting ran late again.",
      "We talked about the schedule.", "The weather was mild and dry.",
      "Dinner was pasta with salad.",  "The train was on time.",
      "Nothing else happened.",        "It was a quiet week.",
  };
  return fillers;
}

const std::string& Pick(Rng& rng, const std::vector<std::string>& items) {
  return items[rng.UniformBelow(items.size())];
}

}  // namespace

std::vector<TextRecord> SsnCorpus(size_t n, uint64_t seed, std::string_view dataset) {
  Rng rng(seed);
  std::vector<TextRecord> records;
  for (size_t i = 0; i < n; ++i) {
    TextRecord r;
    r.id = std::string(dataset) + "-" + std::to_string(i);
    r.dataset = std::string(dataset);
    const std::string number = std::to_string(100 + rng.UniformBelow(900));
    const std::string& phrase = Pick(rng, NeutralPhrases());
    if (rng.UniformUnit() < 0.4) {
      switch (rng.UniformBelow(4)) {
        case 0: r.text = "my ssn is " + number; break;
        case 1: r.text = phrase + " and my ssn is " + number; break;
        case 2: r.text = "can you verify ssn " + number + " for me"; break;
        default: r.text = "the ssn on file is " + number + ", " + phrase; break;
      }
      r.teacher_rating = PrivacyRating(5);
    } else {
      switch (rng.UniformBelow(3)) {
        case 0: r.text = phrase; break;
        case 1: r.text = phrase + " and my code is " + number; break;
        default: r.text = phrase + ", " + Pick(rng, NeutralPhrases()); break;
      }
      r.teacher_rating = PrivacyRating(1);
    }
    records.push_back(std::move(r));
  }
  return records;
}

SyntheticDoc MakeSyntheticDoc(Rng& rng, const std::string& doc_id, int direct, int quasi) {
  struct Segment {
    std::string text;
    std::optional<SpanCategory> category;
  };
  std::vector<Segment> segments;
  for (int i = 0; i < direct; ++i) {
    segments.push_back({Pick(rng, DirectMentions()), SpanCategory::kDirect});
  }
  for (int i = 0; i < quasi; ++i) {
    segments.push_back({Pick(rng, QuasiMentions()), SpanCategory::kQuasi});
  }
  const size_t fillers = 2 + rng.UniformBelow(3);
  for (size_t i = 0; i < fillers; ++i) segments.push_back({Pick(rng, Fillers()), std::nullopt});
  rng.Shuffle(segments);

  SyntheticDoc out;
  out.direct = direct;
  out.quasi = quasi;
  out.doc.doc_id = doc_id;
  for (const auto& segment : segments) {
    if (!out.doc.text.empty()) out.doc.text += ' ';
    if (segment.category) {
      out.doc.text += "Note:";
      out.doc.text += ' ';
      const size_t start = out.doc.text.size();
      out.doc.text += segment.text;
      out.doc.spans.push_back({start, out.doc.text.size(), *segment.category});
      out.doc.text += '.';
    } else {
      out.doc.text += segment.text;
    }
  }
  return out;
}

std::vector<SyntheticDoc> SyntheticDocs(size_t n, uint64_t seed) {
  Rng rng(seed);
  std::vector<SyntheticDoc> docs;
  for (size_t i = 0; i < n; ++i) {
    const int direct = static_cast<int>(rng.UniformBelow(3));
    const int quasi = static_cast<int>(rng.UniformBelow(3));
    docs.push_back(MakeSyntheticDoc(rng, "doc" + std::to_string(i), direct, quasi));
  }
  return docs;
}

int CountIdentifierMentions(std::string_view text) {
  int count = 0;
  for (const auto* list : {&DirectMentions(), &QuasiMentions()}) {
    for (const auto& mention : *list) {
      for (size_t at = text.find(mention); at != std::string_view::npos;
           at = text.find(mention, at + mention.size())) {
        ++count;
      }
    }
  }
  return count;
}

int RuleRating(std::string_view text) {
  return std::min(5, 1 + CountIdentifierMentions(text));
}

std::vector<ScoredText> EntityCountingScorer::ScoreBatch(std::span<const std::string> texts) {
  std::vector<ScoredText> out;
  for (const auto& text : texts) out.push_back({PrivacyRating(RuleRating(text)), std::nullopt});
  return out;
}

struct LocalServer::Impl {
  httplib::Server server;
  std::thread thread;
};

LocalServer::LocalServer(Handler handler) : impl_(std::make_unique<Impl>()) {
  impl_->server.Post(".*", [this, handler](const httplib::Request& req, httplib::Response& res) {
    ++requests_;
    const HttpResponse response = handler(req.path, req.body);
    res.status = response.status;
    res.set_content(response.body, "application/json");
  });
  port_ = impl_->server.bind_to_any_port("127.0.0.1");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

LocalServer::~LocalServer() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

LocalServer::Handler RuleTeacherHandler() {
  return [](const std::string&, const std::string& body) -> HttpResponse {
    try {
      return {200, ChatBody(std::to_string(RuleRating(UserTextFromRequest(body))))};
    } catch (const std::exception& e) {
      return {400, json{{"error", e.what()}}.dump()};
    }
  };
}

LocalServer::Handler ModelScoreHandler(std::shared_ptr<const BaselineModel> model) {
  return [model](const std::string& path, const std::string& body) -> HttpResponse {
    if (path != "/score") return {404, R"({"error":"not found"})"};
    const json request = json::parse(body, nullptr, false);
    if (request.is_discarded() || !request.contains("texts") || !request["texts"].is_array()) {
      return {400, R"({"error":"body must be {\"texts\": [str]}"})"};
    }
    std::vector<std::string> texts;
    for (const auto& t : request["texts"]) {
      if (!t.is_string()) return {400, R"({"error":"texts must be strings"})"};
      texts.push_back(t.get<std::string>());
    }
    const auto scored = Predict(*model, texts);
    return {200, ScoreResponseJson(scored).dump()};
  };
}

}  // namespace privdistill::testing
