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

#include <gtest/gtest.h>

#include <fstream>
#include <mutex>
#include <set>

#include "json.hpp"
#include "privdistill/error.h"
#include "privdistill/teacher.h"
#include "privdistill/text_util.h"
#include "test_support.h"

namespace privdistill {
namespace {

using nlohmann::json;
using testing::ChatBody;
using testing::ScriptedTransport;
using testing::TempDir;
using testing::UserTextFromRequest;

std::vector<TextRecord> Records(size_t n) {
  std::vector<TextRecord> records;
  for (size_t i = 0; i < n; ++i) {
    records.push_back({"r" + std::to_string(i), "text " + std::to_string(i), "d",
                       std::nullopt, std::nullopt});
  }
  return records;
}

TeacherConfig Config() {
  TeacherConfig c;
  c.endpoint_url = "http://stub/v1/chat/completions";
  c.model_name = "stub-model";
  c.parallelism = 1;
  c.backoff_base = std::chrono::milliseconds(100);
  c.backoff_max = std::chrono::milliseconds(1000);
  return c;
}

struct SleepLog {
  std::mutex mutex;
  std::vector<std::chrono::milliseconds> delays;
  AnnotateOptions Options() {
    AnnotateOptions o;
    o.sleep = [this](std::chrono::milliseconds d) {
      std::lock_guard lock(mutex);
      delays.push_back(d);
    };
    o.getenv = [](const std::string&) { return std::optional<std::string>(); };
    return o;
  }
};

HttpResponse Ok(std::string_view content) { return {200, ChatBody(content)}; }

TEST(BuildPrompt, ContainsTextAndScale) {
  const std::string prompt = BuildPrompt("hello");
  EXPECT_NE(prompt.find("hello"), std::string::npos);
  EXPECT_NE(prompt.find("\n1: The user_text is harmless"), std::string::npos);
  EXPECT_NE(prompt.find("on a scale of 1 to 5"), std::string::npos);
  for (const char* line : {"\n2: ", "\n3: ", "\n4: ", "\n5: "}) {
    EXPECT_NE(prompt.find(line), std::string::npos) << line;
  }
  EXPECT_EQ(testing::UserTextFromPrompt(prompt), "hello");
}

TEST(BuildPrompt, PreservesNewlinesVerbatim) {
  const std::string text = "line one\nline two\n\n  indented";
  EXPECT_EQ(testing::UserTextFromPrompt(BuildPrompt(text)), text);
}

TEST(BuildPrompt, EmptyTextRejected) {
  for (const char* text : {"", "   \n\t"}) {
    try {
      BuildPrompt(text);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kEmptyText);
    }
  }
}

TEST(BuildPrompt, TemplateBytesAreFixed) {
  EXPECT_EQ(BuildPrompt("x"), BuildPrompt("x"));
  EXPECT_EQ(BuildPrompt("a").size() + 1, BuildPrompt("ab").size());
}

TEST(ParseRating, AcceptsDigitsWithProse) {
  EXPECT_EQ(ParseRating("3").value(), 3);
  EXPECT_EQ(ParseRating("Rating: 5 \xE2\x80\x94 highly sensitive").value(), 5);
  EXPECT_EQ(ParseRating("  2\n").value(), 2);
  EXPECT_EQ(ParseRating("I would rate this a 4.").value(), 4);
  EXPECT_EQ(ParseRating("**1**").value(), 1);
}

TEST(ParseRating, RejectsOutOfScaleAndMissing) {
  auto code_and_value = [](std::string_view raw) {
    try {
      ParseRating(raw);
    } catch (const Error& e) {
      return std::make_pair(e.code(), e.value());
    }
    return std::make_pair(ErrorCode::kInvalidArgument, std::optional<long long>());
  };
  EXPECT_EQ(code_and_value("6"), std::make_pair(ErrorCode::kOutOfRange,
                                                std::optional<long long>(6)));
  EXPECT_EQ(code_and_value("0").first, ErrorCode::kOutOfRange);
  EXPECT_EQ(code_and_value("-2").second, std::optional<long long>(-2));
  EXPECT_EQ(code_and_value("no rating").first, ErrorCode::kNoRatingFound);
  EXPECT_EQ(code_and_value("").first, ErrorCode::kNoRatingFound);
  EXPECT_EQ(code_and_value("3.5").first, ErrorCode::kNoRatingFound);
  EXPECT_EQ(code_and_value("gpt4 says").first, ErrorCode::kNoRatingFound);
}

TEST(TeacherConfig, Validation) {
  auto invalid = [](TeacherConfig c) {
    try {
      c.Validate();
    } catch (const Error& e) {
      return e.code() == ErrorCode::kInvalidArgument;
    }
    return false;
  };
  EXPECT_NO_THROW(Config().Validate());
  TeacherConfig c = Config();
  c.parallelism = 0;
  EXPECT_TRUE(invalid(c));
  c = Config();
  c.max_retries = 11;
  EXPECT_TRUE(invalid(c));
  c = Config();
  c.temperature = -0.1;
  EXPECT_TRUE(invalid(c));
  c = Config();
  c.model_name.clear();
  EXPECT_TRUE(invalid(c));
}

TEST(AnnotateBatch, CachedRecordIssuesNoRequest) {
  const auto records = Records(2);
  AnnotationCache cache("");
  AnnotationResult cached{"r0", PrivacyRating(2), "2", 1, AnnotationStatus::kOk};
  cache.Insert(AnnotationCache::Key("r0", BuildPrompt(records[0].text), "stub-model"), cached);
  ScriptedTransport transport([](const HttpRequest&, size_t) { return Ok("4"); });
  SleepLog sleeps;
  const auto run = AnnotateBatch(records, Config(), transport, cache, sleeps.Options());
  EXPECT_EQ(transport.calls(), 1u);
  EXPECT_EQ(run.cache_hits, 1u);
  ASSERT_EQ(run.results.size(), 2u);
  EXPECT_EQ(run.results[0].rating, PrivacyRating(2));
  EXPECT_EQ(run.results[1].rating, PrivacyRating(4));
}

TEST(AnnotateBatch, MalformedTwiceThenRating) {
  ScriptedTransport transport([](const HttpRequest&, size_t i) -> HttpResponse {
    if (i < 2) return {200, "{not json"};
    return Ok("4");
  });
  AnnotationCache cache("");
  SleepLog sleeps;
  const auto run = AnnotateBatch(Records(1), Config(), transport, cache, sleeps.Options());
  ASSERT_EQ(run.results.size(), 1u);
  EXPECT_EQ(run.results[0].status, AnnotationStatus::kOk);
  EXPECT_EQ(run.results[0].attempts, 3);
  EXPECT_EQ(run.results[0].rating, PrivacyRating(4));
  EXPECT_EQ(sleeps.delays, (std::vector<std::chrono::milliseconds>{
                               std::chrono::milliseconds(100), std::chrono::milliseconds(200)}));
}

TEST(AnnotateBatch, BackoffDoublesAndCapsAndRespectsBudget) {
  ScriptedTransport transport([](const HttpRequest&, size_t) -> HttpResponse {
    throw TransportError("connection refused");
  });
  AnnotationCache cache("");
  SleepLog sleeps;
  TeacherConfig config = Config();
  config.max_retries = 5;
  config.backoff_max = std::chrono::milliseconds(350);
  auto records = Records(1);
  try {
    AnnotateBatch(records, config, transport, cache, sleeps.Options());
    FAIL() << "expected EndpointUnreachable";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEndpointUnreachable);
  }
  EXPECT_EQ(transport.calls(), 6u);
  using ms = std::chrono::milliseconds;
  EXPECT_EQ(sleeps.delays, (std::vector<ms>{ms(100), ms(200), ms(350), ms(350), ms(350)}));
}

TEST(AnnotateBatch, PersistentOutOfScaleIsParseFailedAndBatchContinues) {
  ScriptedTransport transport([](const HttpRequest& req, size_t) -> HttpResponse {
    return UserTextFromRequest(req.body) == "text 0" ? Ok("0") : Ok("3");
  });
  AnnotationCache cache("");
  SleepLog sleeps;
  const auto run = AnnotateBatch(Records(2), Config(), transport, cache, sleeps.Options());
  ASSERT_EQ(run.results.size(), 2u);
  EXPECT_EQ(run.results[0].status, AnnotationStatus::kParseFailed);
  EXPECT_FALSE(run.results[0].rating.has_value());
  EXPECT_EQ(run.results[0].attempts, 2);
  EXPECT_EQ(run.results[0].raw_response, "0");
  EXPECT_EQ(run.results[1].status, AnnotationStatus::kOk);
  EXPECT_TRUE(sleeps.delays.empty());
  const auto requests = transport.requests();
  ASSERT_EQ(requests.size(), 3u);
  int clarified = 0;
  for (const auto& r : requests) {
    const std::string content =
        json::parse(r.body).at("messages").at(0).at("content").get<std::string>();
    if (content.ends_with(kClarifyingSuffix)) ++clarified;
  }
  EXPECT_EQ(clarified, 1);
}

TEST(AnnotateBatch, ClarifyingRetryRecovers) {
  ScriptedTransport transport([](const HttpRequest&, size_t i) -> HttpResponse {
    return i == 0 ? Ok("It depends on context.") : Ok("Rating: 2");
  });
  AnnotationCache cache("");
  SleepLog sleeps;
  const auto run = AnnotateBatch(Records(1), Config(), transport, cache, sleeps.Options());
  EXPECT_EQ(run.results[0].status, AnnotationStatus::kOk);
  EXPECT_EQ(run.results[0].attempts, 2);
  EXPECT_EQ(run.results[0].rating, PrivacyRating(2));
}

TEST(AnnotateBatch, AttemptsNeverExceedBudget) {
  for (int max_retries : {0, 1, 2, 4}) {
    ScriptedTransport transport([](const HttpRequest&, size_t i) -> HttpResponse {
      if (i % 3 == 0) return {503, "busy"};
      if (i % 3 == 1) return Ok("none");
      return {200, "[]"};
    });
    AnnotationCache cache("");
    SleepLog sleeps;
    TeacherConfig config = Config();
    config.max_retries = max_retries;
    try {
      const auto run = AnnotateBatch(Records(3), config, transport, cache, sleeps.Options());
      for (const auto& r : run.results) {
        EXPECT_GE(r.attempts, 1);
        EXPECT_LE(r.attempts, max_retries + 1);
        EXPECT_EQ(r.status == AnnotationStatus::kOk, r.rating.has_value());
      }
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kEndpointUnreachable);
    }
  }
}

TEST(AnnotateBatch, ClientErrorIsNotRetried) {
  ScriptedTransport transport([](const HttpRequest&, size_t i) -> HttpResponse {
    return i == 0 ? HttpResponse{400, "bad request"} : Ok("1");
  });
  AnnotationCache cache("");
  SleepLog sleeps;
  const auto run = AnnotateBatch(Records(2), Config(), transport, cache, sleeps.Options());
  EXPECT_EQ(run.results[0].status, AnnotationStatus::kTransportFailed);
  EXPECT_EQ(run.results[0].attempts, 1);
  EXPECT_EQ(run.results[1].status, AnnotationStatus::kOk);
  EXPECT_EQ(cache.size(), 1u);
}

TEST(AnnotateBatch, RequestWireFormat) {
  ScriptedTransport transport([](const HttpRequest&, size_t) { return Ok("1"); });
  AnnotationCache cache("");
  AnnotateOptions options;
  options.getenv = [](const std::string& name) -> std::optional<std::string> {
    if (name == "MY_KEY") return "secret";
    return std::nullopt;
  };
  TeacherConfig config = Config();
  config.api_key_env = "MY_KEY";
  config.temperature = 0.25;
  AnnotateBatch(Records(1), config, transport, cache, options);
  const auto request = transport.requests().at(0);
  EXPECT_EQ(request.url, config.endpoint_url);
  const json body = json::parse(request.body);
  EXPECT_EQ(body.at("model"), "stub-model");
  EXPECT_DOUBLE_EQ(body.at("temperature").get<double>(), 0.25);
  EXPECT_EQ(body.at("messages").at(0).at("role"), "user");
  EXPECT_EQ(body.at("messages").at(0).at("content"), BuildPrompt("text 0"));
  bool has_auth = false;
  for (const auto& [k, v] : request.headers) {
    if (k == "Authorization") has_auth = v == "Bearer secret";
  }
  EXPECT_TRUE(has_auth);
}

TEST(AnnotateBatch, CustomResponsePath) {
  ScriptedTransport transport([](const HttpRequest&, size_t) -> HttpResponse {
    return {200, R"({"output":{"text":"5"}})"};
  });
  AnnotationCache cache("");
  TeacherConfig config = Config();
  config.response_path = "/output/text";
  SleepLog sleeps;
  const auto run = AnnotateBatch(Records(1), config, transport, cache, sleeps.Options());
  EXPECT_EQ(run.results[0].rating, PrivacyRating(5));
}

TEST(AnnotateBatch, InFlightBoundedByParallelism) {
  for (int parallelism : {1, 3, 6}) {
    ScriptedTransport transport([](const HttpRequest&, size_t) { return Ok("2"); },
                                std::chrono::milliseconds(5));
    AnnotationCache cache("");
    TeacherConfig config = Config();
    config.parallelism = parallelism;
    SleepLog sleeps;
    const auto run = AnnotateBatch(Records(30), config, transport, cache, sleeps.Options());
    EXPECT_EQ(run.results.size(), 30u);
    EXPECT_LE(transport.max_in_flight(), parallelism);
    if (parallelism > 1) EXPECT_GT(transport.max_in_flight(), 1);
    for (size_t i = 0; i < run.results.size(); ++i) {
      EXPECT_EQ(run.results[i].record_id, "r" + std::to_string(i));
    }
  }
}

TEST(AnnotateBatch, InterruptedRunResumesWithoutDuplicates) {
  TempDir dir;
  const std::string cache_path = dir.File("cache.jsonl");
  const auto records = Records(40);
  std::atomic<bool> cancel{false};
  std::mutex mutex;
  std::multiset<std::string> requested;
  auto handler = [&](const HttpRequest& req, size_t i) -> HttpResponse {
    const std::string text = UserTextFromRequest(req.body);
    {
      std::lock_guard lock(mutex);
      requested.insert(text);
    }
    if (i == 14) cancel = true;
    return Ok(std::to_string(1 + text.size() % 5));
  };
  TeacherConfig config = Config();
  config.cache_path = cache_path;
  config.parallelism = 3;
  SleepLog sleeps;
  size_t first_requests = 0;
  {
    ScriptedTransport transport(handler);
    AnnotationCache cache(cache_path);
    AnnotateOptions options = sleeps.Options();
    options.cancel = &cancel;
    const auto run = AnnotateBatch(records, config, transport, cache, options);
    EXPECT_TRUE(run.interrupted);
    EXPECT_LT(run.results.size(), records.size());
    first_requests = transport.calls();
  }
  cancel = false;
  ScriptedTransport transport(handler);
  AnnotationCache cache(cache_path);
  const auto run = AnnotateBatch(records, config, transport, cache, sleeps.Options());
  EXPECT_FALSE(run.interrupted);
  ASSERT_EQ(run.results.size(), records.size());
  EXPECT_EQ(run.cache_hits, first_requests);
  EXPECT_EQ(first_requests + transport.calls(), records.size());
  for (const auto& text : requested) EXPECT_EQ(requested.count(text), 1u) << text;
}

TEST(AnnotateBatch, IdempotentAcrossRuns) {
  TempDir dir;
  TeacherConfig config = Config();
  config.cache_path = dir.File("cache.jsonl");
  config.parallelism = 4;
  const auto records = Records(25);
  auto handler = [](const HttpRequest& req, size_t) {
    const std::string text = UserTextFromRequest(req.body);
    return text.back() == '7' ? Ok("no idea") : Ok("Rating: " + std::to_string(1 + text.size() % 5));
  };
  SleepLog sleeps;
  std::string first;
  {
    ScriptedTransport transport(handler);
    AnnotationCache cache(config.cache_path);
    first = ResultsToJsonl(AnnotateBatch(records, config, transport, cache, sleeps.Options()).results);
  }
  ScriptedTransport transport(handler);
  AnnotationCache cache(config.cache_path);
  const auto run = AnnotateBatch(records, config, transport, cache, sleeps.Options());
  EXPECT_EQ(transport.calls(), 0u);
  EXPECT_EQ(ResultsToJsonl(run.results), first);
  for (const auto& r : run.results) {
    if (r.status == AnnotationStatus::kOk) EXPECT_EQ(ParseRating(r.raw_response), r.rating);
  }
}

TEST(AnnotateBatch, CacheKeyTracksModelAndPrompt) {
  const std::string prompt = BuildPrompt("x");
  EXPECT_NE(AnnotationCache::Key("r", prompt, "m1"), AnnotationCache::Key("r", prompt, "m2"));
  EXPECT_NE(AnnotationCache::Key("r", prompt, "m1"),
            AnnotationCache::Key("r", BuildPrompt("y"), "m1"));
  EXPECT_NE(AnnotationCache::Key("r1", prompt, "m1"), AnnotationCache::Key("r2", prompt, "m1"));
}

TEST(AnnotationCache, SkipsTruncatedTrailingLine) {
  TempDir dir;
  const std::string path = dir.File("cache.jsonl");
  {
    AnnotationCache cache(path);
    cache.Insert("k1", {"r1", PrivacyRating(3), "3", 1, AnnotationStatus::kOk});
  }
  {
    std::ofstream out(path, std::ios::app);
    out << "{\"key\":\"k2\",\"result\":{\"record_";
  }
  AnnotationCache cache(path);
  EXPECT_EQ(cache.size(), 1u);
  ASSERT_TRUE(cache.Lookup("k1").has_value());
  EXPECT_EQ(cache.Lookup("k1")->rating, PrivacyRating(3));
}

TEST(AnnotateBatch, EndpointUnreachableOnlyWithoutAnySuccess) {
  ScriptedTransport failing([](const HttpRequest&, size_t) -> HttpResponse {
    throw TransportError("down");
  });
  TeacherConfig config = Config();
  config.max_retries = 0;
  auto records = Records(2);
  {
    AnnotationCache cache("");
    cache.Insert(AnnotationCache::Key("r0", BuildPrompt(records[0].text), "stub-model"),
                 {"r0", PrivacyRating(1), "1", 1, AnnotationStatus::kOk});
    SleepLog sleeps;
    const auto run = AnnotateBatch(records, config, failing, cache, sleeps.Options());
    EXPECT_EQ(run.results[1].status, AnnotationStatus::kTransportFailed);
  }
  AnnotationCache empty("");
  SleepLog sleeps;
  EXPECT_THROW(AnnotateBatch(records, config, failing, empty, sleeps.Options()), Error);
}

TEST(AnnotateBatch, MajorityVoteTiesGoLow) {
  ScriptedTransport transport([](const HttpRequest&, size_t i) -> HttpResponse {
    static const char* answers[] = {"4", "2", "4", "2"};
    return Ok(answers[i % 4]);
  });
  AnnotationCache cache("");
  TeacherConfig config = Config();
  config.votes = 4;
  SleepLog sleeps;
  const auto run = AnnotateBatch(Records(1), config, transport, cache, sleeps.Options());
  EXPECT_EQ(run.results[0].rating, PrivacyRating(2));
  EXPECT_EQ(run.results[0].attempts, 4);
}

TEST(AnnotationResult, JsonRoundTrip) {
  const AnnotationResult a{"id", PrivacyRating(5), "Rating: 5", 2, AnnotationStatus::kOk};
  EXPECT_EQ(AnnotationResultFromJson(ToJson(a)), a);
  const AnnotationResult b{"id", std::nullopt, "???", 4, AnnotationStatus::kParseFailed};
  EXPECT_EQ(AnnotationResultFromJson(ToJson(b)), b);
}

TEST(ApplyAnnotations, OnlyOkResultsSetRatings) {
  auto records = Records(2);
  const auto out = ApplyAnnotations(
      records, {{"r0", PrivacyRating(4), "4", 1, AnnotationStatus::kOk},
                {"r1", std::nullopt, "x", 2, AnnotationStatus::kParseFailed}});
  EXPECT_EQ(out[0].teacher_rating, PrivacyRating(4));
  EXPECT_FALSE(out[1].teacher_rating.has_value());
}

}  // namespace
}  // namespace privdistill
