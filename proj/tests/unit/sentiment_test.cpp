// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "dialeval/sentiment.hpp"

#include <gtest/gtest.h>

#include <fstream>

#include "dialeval/error.hpp"
#include "oracles.hpp"
#include "stub_backend.hpp"

namespace dialeval {
namespace {

TEST(Tokenize, LowercasesAndSplitsOnPunctuation) {
  EXPECT_EQ(tokenize("Don't STOP, me-now!"),
            (std::vector<std::string>{"don", "t", "stop", "me", "now"}));
  EXPECT_TRUE(tokenize("  ...  ").empty());
}

TEST(Tokenize, KeepsNonAsciiBytesInsideTokens) {
  EXPECT_EQ(tokenize("café good"), oracle::words("café good"));
  EXPECT_EQ(tokenize("café good").size(), 2u);
}

TEST(Lexicon, BuiltinIsValid) {
  const Lexicon& lex = Lexicon::builtin();
  EXPECT_NO_THROW(lex.validate());
  EXPECT_TRUE(lex.positive.count("good"));
  EXPECT_TRUE(lex.negative.count("bad"));
  EXPECT_EQ(lex.negation_window, 3u);
}

TEST(Lexicon, RejectsOverlapAndEmpty) {
  Lexicon lex;
  lex.positive = {"good"};
  lex.negative = {"good"};
  EXPECT_THROW(lex.validate(), ConfigError);
  Lexicon empty;
  EXPECT_THROW(empty.validate(), ConfigError);
}

TEST(Lexicon, FromJsonAndDigest) {
  const auto j = nlohmann::json{{"positive", {"nice"}}, {"negative", {"meh"}}, {"negators", {"not"}},
                                {"negation_window", 2}};
  const Lexicon a = Lexicon::from_json(j);
  EXPECT_EQ(a.negation_window, 2u);
  EXPECT_EQ(a.digest(), Lexicon::from_json(j).digest());
  auto j2 = j;
  j2["positive"].push_back("fine");
  EXPECT_NE(a.digest(), Lexicon::from_json(j2).digest());
  EXPECT_THROW(Lexicon::from_json(nlohmann::json{{"positive", 3}}), ConfigError);
}

TEST(LexiconSentiment, BasicPolarity) {
  const Lexicon& lex = Lexicon::builtin();
  EXPECT_DOUBLE_EQ(lexicon_sentiment("i love this", lex).value, 1.0);
  EXPECT_DOUBLE_EQ(lexicon_sentiment("this is bad", lex).value, -1.0);
  EXPECT_DOUBLE_EQ(lexicon_sentiment("hello there", lex).value, 0.0);
}

TEST(LexiconSentiment, NegationWindowOfThree) {
  const Lexicon& lex = Lexicon::builtin();
  // love flipped by "not" one back; bad flipped by "not" three back.
  EXPECT_DOUBLE_EQ(lexicon_sentiment("i do not love this bad movie", lex).value, 0.0);
}

TEST(LexiconSentiment, NegationWindowOfTwo) {
  Lexicon lex = Lexicon::builtin();
  lex.negation_window = 2;
  EXPECT_DOUBLE_EQ(lexicon_sentiment("i do not love this bad movie", lex).value, -1.0);
}

TEST(LexiconSentiment, HandDerivedFixture) {
  std::ifstream in(DIALEVAL_TEST_DATA_DIR "/lexicon_fixture.json");
  ASSERT_TRUE(in);
  const auto cases = nlohmann::json::parse(in);
  ASSERT_EQ(cases.size(), 20u);
  for (const auto& c : cases) {
    const double expected = c["expected"][0].get<double>() / c["expected"][1].get<double>();
    EXPECT_EQ(lexicon_sentiment(c["text"].get<std::string>(), Lexicon::builtin()).value, expected)
        << c["text"];
  }
}

TEST(SentimentScore, FromProbabilities) {
  const auto s = SentimentScore::from_probabilities(0.1, 0.2, 0.7);
  EXPECT_NEAR(s.value, 0.6, 1e-12);
  ASSERT_TRUE(s.class_probabilities.has_value());
  EXPECT_THROW(SentimentScore::from_probabilities(0.5, 0.5, 0.5), ProtocolError);
  EXPECT_THROW(SentimentScore::from_probabilities(-0.1, 0.4, 0.7), ProtocolError);
}

TEST(SentimentScore, QualityMapping) {
  EXPECT_DOUBLE_EQ(sentiment_to_quality(-1.0), 0.0);
  EXPECT_DOUBLE_EQ(sentiment_to_quality(0.0), 0.5);
  EXPECT_DOUBLE_EQ(sentiment_to_quality(1.0), 1.0);
  EXPECT_DOUBLE_EQ(quality_to_sentiment(sentiment_to_quality(0.3)), 0.3);
}

TEST(SentimentScorer, LexiconAndBackendAgreeOnSign) {
  testing::StubBackend stub;
  LexiconSentimentScorer lex(Lexicon::builtin());
  BackendSentimentScorer remote(stub);
  const std::vector<std::string> texts{"i love this", "this is bad", "meh"};
  const auto a = lex.score(texts);
  const auto b = remote.score(texts);
  ASSERT_EQ(a.size(), 3u);
  ASSERT_EQ(b.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a[i].value > 0, b[i].value > 0);
  EXPECT_EQ(stub.sentiment_calls, 1u);
  EXPECT_DOUBLE_EQ(lex.score_one("good").value, 1.0);
}

}  // namespace
}  // namespace dialeval
