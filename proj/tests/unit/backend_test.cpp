// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "dialeval/backend.hpp"

#include <gtest/gtest.h>

#include <thread>

#include "dialeval/error.hpp"
#include "fixtures.hpp"
#include "stub_backend.hpp"

namespace dialeval {
namespace {

using nlohmann::json;

std::vector<Turn> two_turns() {
  return testing::make_dialog("d", {{'u', "hi"}, {'s', "hello"}}).turns;
}

TEST(Wire, GenerateBody) {
  GenerationRequest req;
  req.context = two_turns();
  req.mode = GenerationMode::kFeedback;
  req.max_tokens = 8;
  const json body = generate_request_body(req);
  EXPECT_EQ(body["mode"], "feedback");
  EXPECT_EQ(body["max_tokens"], 8);
  EXPECT_TRUE(body["seed"].is_null());
  EXPECT_EQ(body["context"],
            json::parse(R"([{"speaker":"user","text":"hi"},{"speaker":"system","text":"hello"}])"));
  req.seed = 42;
  EXPECT_EQ(generate_request_body(req)["seed"], 42);
}

TEST(Wire, SentimentAndQualityBodies) {
  const std::vector<std::string> texts{"a", "b"};
  EXPECT_EQ(sentiment_request_body(texts), json::parse(R"({"texts":["a","b"]})"));
  EXPECT_EQ(turn_quality_request_body(two_turns())["context"].size(), 2u);
}

TEST(Wire, ParseGenerate) {
  EXPECT_EQ(parse_generate_response(json{{"text", "i love this"}}), "i love this");
  EXPECT_THROW(parse_generate_response(json{{"txt", "x"}}), ProtocolError);
  EXPECT_THROW(parse_generate_response(json{{"text", 3}}), ProtocolError);
}

TEST(Wire, ParseSentiment) {
  const json ok = json::parse(R"({"scores":[{"negative":0.1,"neutral":0.2,"positive":0.7}]})");
  const auto s = parse_sentiment_response(ok, 1);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_NEAR(s[0].value, 0.6, 1e-12);
  EXPECT_THROW(parse_sentiment_response(ok, 2), ProtocolError);
  const json bad = json::parse(R"({"scores":[{"negative":0.5,"neutral":0.5,"positive":0.5}]})");
  EXPECT_THROW(parse_sentiment_response(bad, 1), ProtocolError);
}

TEST(Wire, ParseTurnQuality) {
  EXPECT_DOUBLE_EQ(parse_turn_quality_response(json{{"quality", 0.7}}), 0.7);
  EXPECT_THROW(parse_turn_quality_response(json{{"quality", 1.2}}), ProtocolError);
  EXPECT_THROW(parse_turn_quality_response(json{{"quality", "high"}}), ProtocolError);
}

TEST(Wire, GenerationModeStrings) {
  EXPECT_EQ(to_string(GenerationMode::kNextUser), "next_user");
  EXPECT_EQ(parse_generation_mode("feedback"), GenerationMode::kFeedback);
  EXPECT_THROW(parse_generation_mode("chat"), DataError);
}

TEST(Bounded, CapsConcurrentCalls) {
  testing::StubBackend stub;
  stub.delay = std::chrono::milliseconds(5);
  BoundedBackend bounded(stub, 2);
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] {
      for (int k = 0; k < 3; ++k) bounded.turn_quality(two_turns());
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(stub.quality_calls, 24u);
  EXPECT_LE(stub.peak.load(), 2u);
  EXPECT_LE(bounded.peak_in_flight(), 2u);
}

TEST(Bounded, ReleasesSlotOnError) {
  testing::StubBackend stub;
  stub.fail_quality = true;
  BoundedBackend bounded(stub, 1);
  EXPECT_THROW(bounded.turn_quality(two_turns()), TransportError);
  stub.fail_quality = false;
  EXPECT_DOUBLE_EQ(bounded.turn_quality(two_turns()), 0.5);
}

}  // namespace
}  // namespace dialeval
