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

#include <set>

#include "privdistill/error.h"
#include "privdistill/random.h"
#include "privdistill/rating.h"
#include "privdistill/tabular_io.h"
#include "privdistill/text_util.h"

namespace privdistill {
namespace {

TEST(PrivacyRating, AcceptsOneToFive) {
  for (int v = 1; v <= 5; ++v) {
    const PrivacyRating r(v);
    EXPECT_EQ(r.value(), v);
    EXPECT_EQ(r.index(), v - 1);
    EXPECT_EQ(PrivacyRating::FromIndex(v - 1), r);
  }
  EXPECT_EQ(PrivacyRating(1).name(), "Harmless");
  EXPECT_EQ(PrivacyRating(5).name(), "Extremely private");
}

TEST(PrivacyRating, RejectsOutOfScale) {
  for (int v : {0, 6, -1}) {
    try {
      PrivacyRating r(v);
      FAIL() << "accepted " << r.value();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kOutOfRange);
      EXPECT_EQ(e.value(), v);
    }
  }
}

TEST(PrivacyRating, ArgmaxTiesGoLow) {
  EXPECT_EQ(ArgmaxLowest({0.2, 0.2, 0.2, 0.2, 0.2}), 0);
  EXPECT_EQ(ArgmaxLowest({0.1, 0.4, 0.1, 0.4, 0.0}), 1);
  EXPECT_EQ(ArgmaxLowest({0.0, 0.0, 0.0, 0.0, 1.0}), 4);
}

TEST(ErrorCategory, MapsToExitClasses) {
  EXPECT_EQ(ErrorCategoryOf(ErrorCode::kEndpointUnreachable), ErrorCategory::kEndpoint);
  EXPECT_EQ(ErrorCategoryOf(ErrorCode::kProtocolError), ErrorCategory::kEndpoint);
  EXPECT_EQ(ErrorCategoryOf(ErrorCode::kInvalidArgument), ErrorCategory::kUsage);
  EXPECT_EQ(ErrorCategoryOf(ErrorCode::kBadFractions), ErrorCategory::kUsage);
  EXPECT_EQ(ErrorCategoryOf(ErrorCode::kFormatError), ErrorCategory::kData);
  const Error e(ErrorCode::kScorerFailure, "x", ErrorCode::kEndpointUnreachable);
  EXPECT_EQ(e.cause(), ErrorCode::kEndpointUnreachable);
  EXPECT_NE(std::string(e.what()).find("ScorerFailure"), std::string::npos);
}

TEST(TextUtil, Fnv1aKnownVectors) {
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(Fnv1a64("foobar"), 0x85944171f73967e8ULL);
  EXPECT_EQ(HexU64(0xabcULL), "0000000000000abc");
}

TEST(TextUtil, NormalizationCollapsesCaseAndSpace) {
  EXPECT_EQ(NormalizeText("  Hello \t\n WORLD  "), "hello world");
  EXPECT_EQ(NormalizedTextHash("Hello world"), NormalizedTextHash(" hello   WORLD\n"));
  EXPECT_NE(NormalizedTextHash("hello world"), NormalizedTextHash("hello  worlds"));
}

TEST(TextUtil, WordSpansAreMaximalNonSpaceRuns) {
  const std::string text = "  a bc,\td  ";
  const auto spans = WordSpans(text);
  ASSERT_EQ(spans.size(), 3u);
  EXPECT_EQ(text.substr(spans[0].first, spans[0].second - spans[0].first), "a");
  EXPECT_EQ(text.substr(spans[1].first, spans[1].second - spans[1].first), "bc,");
  EXPECT_EQ(text.substr(spans[2].first, spans[2].second - spans[2].first), "d");
  EXPECT_TRUE(WordSpans("   ").empty());
}

TEST(TextUtil, ReadMissingFileFails) {
  try {
    ReadFile("/nonexistent/privdistill/file");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFileUnreadable);
  }
}

TEST(Rng, UniformBelowStaysInRangeAndCoversIt) {
  Rng rng(7);
  std::set<uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const uint64_t v = rng.UniformBelow(7);
    ASSERT_LT(v, 7u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const uint64_t x = a.NextU64();
    EXPECT_EQ(x, b.NextU64());
    differs |= x != c.NextU64();
  }
  EXPECT_TRUE(differs);
  EXPECT_NE(MixSeed(1, 2), MixSeed(1, 3));
  EXPECT_NE(MixSeed(1, 2), MixSeed(2, 2));
}

TEST(Rng, CategoricalFollowsWeights) {
  Rng rng(3);
  std::vector<double> weights = {0.0, 1.0, 3.0};
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < 40000; ++i) ++counts[rng.Categorical(weights)];
  EXPECT_EQ(counts[0], 0);
  EXPECT_NEAR(counts[2] / 40000.0, 0.75, 0.01);
}

TEST(Csv, QuotedFieldsAndEmbeddedNewlines) {
  const auto rows = ParseCsv("a,b\n\"x, y\",\"he said \"\"hi\"\"\"\n\"multi\nline\",z\n");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].fields[0], "x, y");
  EXPECT_EQ(rows[1].fields[1], "he said \"hi\"");
  EXPECT_EQ(rows[2].fields[0], "multi\nline");
  EXPECT_EQ(rows[2].line_number, 3u);
}

TEST(Csv, CrLfAndMissingFinalNewline) {
  const auto rows = ParseCsv("a,b\r\n1,2");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].fields, (std::vector<std::string>{"1", "2"}));
}

TEST(Csv, UnterminatedQuoteIsFormatError) {
  try {
    ParseCsv("a\n\"open\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormatError);
  }
}

TEST(JsonLines, SkipsBlankAndProvenanceLines) {
  std::vector<size_t> lines;
  ForEachJsonLine("{\"_provenance\":{}}\n\n{\"a\":1}\n  \n{\"a\":2}\n",
                  [&](size_t line, const nlohmann::json& j) {
                    lines.push_back(line);
                    EXPECT_TRUE(j.contains("a"));
                  });
  EXPECT_EQ(lines, (std::vector<size_t>{3, 5}));
}

TEST(JsonLines, ReportsLineOfBadJson) {
  try {
    ForEachJsonLine("{\"a\":1}\n{oops\n", [](size_t, const nlohmann::json&) {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormatError);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(JsonLines, ArrayOrLines) {
  EXPECT_EQ(ParseJsonArrayOrLines("[{\"a\":1},{\"a\":2}]").size(), 2u);
  EXPECT_EQ(ParseJsonArrayOrLines("{\"a\":1}\n{\"a\":2}\n").size(), 2u);
}

}  // namespace
}  // namespace privdistill
