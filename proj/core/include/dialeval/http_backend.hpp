// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "dialeval/backend.hpp"

namespace dialeval {

struct RetryPolicy {
  int attempts = 3;
  /// Doubles after every failed attempt.
  std::chrono::milliseconds initial_backoff{250};
};

/// JSON-over-HTTP client for the inference protocol. Connection failures,
/// 5xx and 429 are retried per `RetryPolicy`; other non-200 statuses and
/// malformed bodies are protocol errors and are not retried.
class HttpBackend final : public InferenceBackend {
 public:
  /// `url` is "http://host[:port][/prefix]".
  explicit HttpBackend(std::string url, RetryPolicy retry = {},
                       std::chrono::seconds timeout = std::chrono::seconds(60));
  ~HttpBackend() override;

  std::string generate(const GenerationRequest& req) override;
  std::vector<SentimentScore> sentiment(std::span<const std::string> texts) override;
  double turn_quality(const std::vector<Turn>& context) override;
  bool healthy() override;
  std::string endpoint() const override { return url_; }

 private:
  nlohmann::json post(const std::string& path, const nlohmann::json& body);

  std::string url_;
  std::string host_;
  std::string prefix_;
  RetryPolicy retry_;
  std::chrono::seconds timeout_;
};

}  // namespace dialeval
