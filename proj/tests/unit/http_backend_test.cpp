// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "dialeval/http_backend.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <thread>

#include "dialeval/error.hpp"
#include "fixtures.hpp"

namespace dialeval {
namespace {

using nlohmann::json;

// Protocol server on a loopback port; handlers are installed per test.
class LocalServer {
 public:
  LocalServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  std::string url(const std::string& prefix = "") const {
    return "http://127.0.0.1:" + std::to_string(port_) + prefix;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

RetryPolicy fast_retry() { return {3, std::chrono::milliseconds(1)}; }

std::vector<Turn> context() { return testing::make_dialog("d", {{'u', "hi"}, {'s', "good"}}).turns; }

TEST(HttpBackend, RejectsBadUrls) {
  EXPECT_THROW(HttpBackend("https://example.org"), ConfigError);
  EXPECT_THROW(HttpBackend("http://"), ConfigError);
}

TEST(HttpBackend, FullWirePath) {
  LocalServer srv;
  json seen_generate;
  srv.server().Post("/api/v1/generate", [&](const httplib::Request& req, httplib::Response& res) {
    seen_generate = json::parse(req.body);
    res.set_content(R"({"text":"i love this"})", "application/json");
  });
  srv.server().Post("/api/v1/sentiment", [](const httplib::Request& req, httplib::Response& res) {
    const auto n = json::parse(req.body)["texts"].size();
    json scores = json::array();
    for (std::size_t i = 0; i < n; ++i) {
      scores.push_back({{"negative", 0.1}, {"neutral", 0.2}, {"positive", 0.7}});
    }
    res.set_content(json{{"scores", scores}}.dump(), "application/json");
  });
  srv.server().Post("/api/v1/turn_quality", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"quality":0.7})", "application/json");
  });
  srv.server().Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("ok", "text/plain");
  });

  HttpBackend b(srv.url("/api/"), fast_retry());
  EXPECT_TRUE(b.healthy());
  GenerationRequest req;
  req.context = context();
  req.seed = 7;
  EXPECT_EQ(b.generate(req), "i love this");
  EXPECT_EQ(seen_generate["mode"], "next_user");
  EXPECT_EQ(seen_generate["seed"], 7);
  const std::vector<std::string> texts{"x", "y"};
  const auto s = b.sentiment(texts);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_NEAR(s[1].value, 0.6, 1e-12);
  EXPECT_DOUBLE_EQ(b.turn_quality(context()), 0.7);
}

TEST(HttpBackend, ClientErrorIsProtocolErrorWithoutRetry) {
  LocalServer srv;
  std::atomic<int> hits{0};
  srv.server().Post("/v1/turn_quality", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 400;
    res.set_content("missing field: context", "text/plain");
  });
  HttpBackend b(srv.url(), fast_retry());
  EXPECT_THROW(b.turn_quality(context()), ProtocolError);
  EXPECT_EQ(hits, 1);
}

TEST(HttpBackend, UnknownFixtureIs404) {
  LocalServer srv;
  HttpBackend b(srv.url(), fast_retry());
  EXPECT_THROW(b.turn_quality(context()), ProtocolError);
}

TEST(HttpBackend, OutOfRangeQualityIsProtocolError) {
  LocalServer srv;
  srv.server().Post("/v1/turn_quality", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"quality":1.5})", "application/json");
  });
  HttpBackend b(srv.url(), fast_retry());
  EXPECT_THROW(b.turn_quality(context()), ProtocolError);
}

TEST(HttpBackend, RetriesServerErrorsThenSucceeds) {
  LocalServer srv;
  std::atomic<int> hits{0};
  srv.server().Post("/v1/turn_quality", [&](const httplib::Request&, httplib::Response& res) {
    if (++hits < 3) {
      res.status = hits == 1 ? 503 : 429;
      return;
    }
    res.set_content(R"({"quality":0.25})", "application/json");
  });
  HttpBackend b(srv.url(), fast_retry());
  EXPECT_DOUBLE_EQ(b.turn_quality(context()), 0.25);
  EXPECT_EQ(hits, 3);
}

TEST(HttpBackend, ExhaustedRetriesCarryEndpointAndAttempts) {
  LocalServer srv;
  std::atomic<int> hits{0};
  srv.server().Post("/v1/turn_quality", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 500;
  });
  HttpBackend b(srv.url(), fast_retry());
  try {
    b.turn_quality(context());
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_EQ(e.endpoint(), srv.url());
    EXPECT_EQ(e.attempts(), 3);
  }
  EXPECT_EQ(hits, 3);
}

TEST(HttpBackend, UnreachableHostIsTransportError) {
  int port = 0;
  {
    LocalServer srv;
    port = std::stoi(srv.url().substr(std::string("http://127.0.0.1:").size()));
  }
  HttpBackend b("http://127.0.0.1:" + std::to_string(port), {2, std::chrono::milliseconds(1)},
                std::chrono::seconds(2));
  EXPECT_THROW(b.turn_quality(context()), TransportError);
  EXPECT_FALSE(b.healthy());
}

}  // namespace
}  // namespace dialeval
