// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "dialeval/http_backend.hpp"

#include <httplib.h>

#include <thread>

#include "dialeval/error.hpp"

namespace dialeval {

HttpBackend::HttpBackend(std::string url, RetryPolicy retry, std::chrono::seconds timeout)
    : url_(std::move(url)), retry_(retry), timeout_(timeout) {
  if (url_.rfind("http://", 0) != 0) {
    throw ConfigError("backend url must start with http:// (got '" + url_ + "')");
  }
  if (retry_.attempts < 1) throw ConfigError("retry attempts must be >= 1");
  const auto path_start = url_.find('/', 7);
  if (path_start == std::string::npos) {
    host_ = url_;
  } else {
    host_ = url_.substr(0, path_start);
    prefix_ = url_.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }
  if (host_.size() <= 7) throw ConfigError("backend url has no host: '" + url_ + "'");
}

HttpBackend::~HttpBackend() = default;

nlohmann::json HttpBackend::post(const std::string& path, const nlohmann::json& body) {
  httplib::Client cli(host_);
  cli.set_connection_timeout(timeout_);
  cli.set_read_timeout(timeout_);
  cli.set_write_timeout(timeout_);
  const std::string target = prefix_ + path;
  const std::string payload = body.dump();
  auto backoff = retry_.initial_backoff;
  std::string last_failure;
  for (int attempt = 1; attempt <= retry_.attempts; ++attempt) {
    auto res = cli.Post(target, payload, "application/json");
    if (res && res->status == 200) {
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::parse_error&) {
        throw ProtocolError(path + ": response body is not JSON");
      }
    }
    if (res && res->status != 429 && res->status < 500) {
      throw ProtocolError(path + ": HTTP " + std::to_string(res->status) + " " + res->body);
    }
    last_failure = res ? "HTTP " + std::to_string(res->status)
                       : httplib::to_string(res.error());
    if (attempt < retry_.attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw TransportError(url_, retry_.attempts, path + ": " + last_failure);
}

std::string HttpBackend::generate(const GenerationRequest& req) {
  return parse_generate_response(post("/v1/generate", generate_request_body(req)));
}

std::vector<SentimentScore> HttpBackend::sentiment(std::span<const std::string> texts) {
  return parse_sentiment_response(post("/v1/sentiment", sentiment_request_body(texts)),
                                  texts.size());
}

double HttpBackend::turn_quality(const std::vector<Turn>& context) {
  return parse_turn_quality_response(
      post("/v1/turn_quality", turn_quality_request_body(context)));
}

bool HttpBackend::healthy() {
  httplib::Client cli(host_);
  cli.set_connection_timeout(timeout_);
  cli.set_read_timeout(timeout_);
  auto res = cli.Get(prefix_ + "/health");
  return res && res->status == 200;
}

}  // namespace dialeval
