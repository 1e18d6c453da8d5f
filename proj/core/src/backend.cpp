// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "dialeval/backend.hpp"

#include "dialeval/error.hpp"

namespace dialeval {

using nlohmann::json;

std::string_view to_string(GenerationMode m) {
  return m == GenerationMode::kNextUser ? "next_user" : "feedback";
}

GenerationMode parse_generation_mode(std::string_view s) {
  if (s == "next_user") return GenerationMode::kNextUser;
  if (s == "feedback") return GenerationMode::kFeedback;
  throw DataError("unknown generation mode '" + std::string(s) + "'");
}

json generate_request_body(const GenerationRequest& req) {
  return {{"context", context_to_json(req.context)},
          {"mode", to_string(req.mode)},
          {"max_tokens", req.max_tokens},
          {"seed", req.seed ? json(*req.seed) : json(nullptr)}};
}

json sentiment_request_body(std::span<const std::string> texts) {
  json arr = json::array();
  for (const auto& t : texts) arr.push_back(t);
  return {{"texts", std::move(arr)}};
}

json turn_quality_request_body(const std::vector<Turn>& context) {
  return {{"context", context_to_json(context)}};
}

std::string parse_generate_response(const json& body) {
  if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
    throw ProtocolError("/v1/generate: response lacks string field 'text'");
  }
  return body["text"].get<std::string>();
}

std::vector<SentimentScore> parse_sentiment_response(const json& body,
                                                     std::size_t expected_count) {
  if (!body.is_object() || !body.contains("scores") || !body["scores"].is_array()) {
    throw ProtocolError("/v1/sentiment: response lacks array field 'scores'");
  }
  const json& scores = body["scores"];
  if (scores.size() != expected_count) {
    throw ProtocolError("/v1/sentiment: expected " + std::to_string(expected_count) +
                        " scores, got " + std::to_string(scores.size()));
  }
  std::vector<SentimentScore> out;
  out.reserve(scores.size());
  for (const auto& s : scores) {
    auto prob = [&](const char* key) {
      if (!s.is_object() || !s.contains(key) || !s[key].is_number()) {
        throw ProtocolError(std::string("/v1/sentiment: score lacks numeric '") + key + "'");
      }
      return s[key].get<double>();
    };
    out.push_back(SentimentScore::from_probabilities(prob("negative"), prob("neutral"),
                                                     prob("positive")));
  }
  return out;
}

double parse_turn_quality_response(const json& body) {
  if (!body.is_object() || !body.contains("quality") || !body["quality"].is_number()) {
    throw ProtocolError("/v1/turn_quality: response lacks numeric 'quality'");
  }
  const double q = body["quality"].get<double>();
  if (!(q >= 0.0 && q <= 1.0)) {
    throw ProtocolError("/v1/turn_quality: quality out of [0,1]: " + json(q).dump());
  }
  return q;
}

class BoundedBackend::Slot {
 public:
  explicit Slot(BoundedBackend& b) : b_(b) {
    std::unique_lock lock(b_.mu_);
    b_.cv_.wait(lock, [&] { return b_.in_flight_ < b_.limit_; });
    ++b_.in_flight_;
    b_.peak_ = std::max(b_.peak_, b_.in_flight_);
  }
  ~Slot() {
    {
      std::lock_guard lock(b_.mu_);
      --b_.in_flight_;
    }
    b_.cv_.notify_one();
  }
  Slot(const Slot&) = delete;
  Slot& operator=(const Slot&) = delete;

 private:
  BoundedBackend& b_;
};

BoundedBackend::BoundedBackend(InferenceBackend& inner, std::size_t max_in_flight)
    : inner_(inner), limit_(max_in_flight) {
  if (max_in_flight == 0) throw ConfigError("max in-flight requests must be >= 1");
}

std::string BoundedBackend::generate(const GenerationRequest& req) {
  Slot s(*this);
  return inner_.generate(req);
}

std::vector<SentimentScore> BoundedBackend::sentiment(std::span<const std::string> texts) {
  Slot s(*this);
  return inner_.sentiment(texts);
}

double BoundedBackend::turn_quality(const std::vector<Turn>& context) {
  Slot s(*this);
  return inner_.turn_quality(context);
}

bool BoundedBackend::healthy() {
  Slot s(*this);
  return inner_.healthy();
}

std::size_t BoundedBackend::peak_in_flight() const {
  std::lock_guard lock(mu_);
  return peak_;
}

}  // namespace dialeval
