// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialeval/dialog.hpp"
#include "dialeval/sentiment.hpp"

namespace dialeval {

enum class GenerationMode { kNextUser, kFeedback };

std::string_view to_string(GenerationMode m);
GenerationMode parse_generation_mode(std::string_view s);

struct GenerationRequest {
  std::vector<Turn> context;
  GenerationMode mode = GenerationMode::kNextUser;
  int max_tokens = 32;
  std::optional<std::int64_t> seed;
};

/// Client side of the inference protocol. Implementations must be safe to
/// call from several threads at once.
class InferenceBackend {
 public:
  virtual ~InferenceBackend() = default;

  /// POST /v1/generate
  virtual std::string generate(const GenerationRequest& req) = 0;
  /// POST /v1/sentiment; one score per input text, in order.
  virtual std::vector<SentimentScore> sentiment(std::span<const std::string> texts) = 0;
  /// POST /v1/turn_quality
  virtual double turn_quality(const std::vector<Turn>& context) = 0;
  /// GET /health
  virtual bool healthy() = 0;

  virtual std::string endpoint() const = 0;
};

// Wire shapes. Request builders produce exactly the protocol bodies; the
// parsers validate responses and throw ProtocolError on any deviation.
nlohmann::json generate_request_body(const GenerationRequest& req);
nlohmann::json sentiment_request_body(std::span<const std::string> texts);
nlohmann::json turn_quality_request_body(const std::vector<Turn>& context);

std::string parse_generate_response(const nlohmann::json& body);
std::vector<SentimentScore> parse_sentiment_response(const nlohmann::json& body,
                                                     std::size_t expected_count);
double parse_turn_quality_response(const nlohmann::json& body);

/// Caps the number of concurrent calls into a wrapped backend.
class BoundedBackend final : public InferenceBackend {
 public:
  BoundedBackend(InferenceBackend& inner, std::size_t max_in_flight);

  std::string generate(const GenerationRequest& req) override;
  std::vector<SentimentScore> sentiment(std::span<const std::string> texts) override;
  double turn_quality(const std::vector<Turn>& context) override;
  bool healthy() override;
  std::string endpoint() const override { return inner_.endpoint(); }

  std::size_t peak_in_flight() const;

 private:
  class Slot;

  InferenceBackend& inner_;
  const std::size_t limit_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::size_t in_flight_ = 0;
  std::size_t peak_ = 0;
};

}  // namespace dialeval
