// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "dialeval/commands.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dialeval/ingestion.hpp"
#include "dialeval/synthetic.hpp"
#include "fixtures.hpp"
#include "stub_backend.hpp"

namespace dialeval::cli {
namespace {

using nlohmann::json;
using testing::make_dialog;
using testing::TempDir;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args, const Environment& env = {}) {
  std::ostringstream out, err;
  const int code = run(args, out, err, env);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_corpus(const std::filesystem::path& p, const std::vector<Dialog>& ds) {
  std::ofstream f(p);
  write_canonical(f, ds);
}

std::vector<Dialog> small_corpus() {
  return {make_dialog("a", {{'u', "hi"}, {'s', "x", 1.0}, {'u', "i love it"}, {'s', "y", 0.5}},
                      5.0, {4.0}),
          make_dialog("b", {{'u', "hi"}, {'s', "x", 0.0}, {'u', "this is bad"}}, 1.0, {2.0}),
          make_dialog("c", {{'u', "hi"}, {'s', "x", 0.5}, {'u', "good and bad"}}, 3.0, {3.0})};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    corpus_ = dir_.path() / "corpus.jsonl";
    write_corpus(corpus_, small_corpus());
  }
  std::string corpus() const { return corpus_.string(); }
  std::string out(const std::string& sub) const { return dir_.str(sub); }

  TempDir dir_{"cli"};
  std::filesystem::path corpus_;
};

TEST_F(Cli, IngestSummary) {
  const auto r = run_cli({"ingest", "--corpus", corpus(), "--out", out("ing")});
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(r.out, "3 dialogs, 10 turns, 4 labeled turns, 3 rated dialogs\n");
  EXPECT_EQ(slurp(out("ing") + "/corpus.jsonl"), slurp(corpus()));
  const auto manifest = json::parse(slurp(out("ing") + "/ingest.manifest.json"));
  EXPECT_EQ(manifest["inputs"]["corpus"]["name"], "corpus.jsonl");
  EXPECT_TRUE(manifest["outputs"].contains("corpus.jsonl"));
}

TEST_F(Cli, IngestStrictAndLenient) {
  std::string text = slurp(corpus());
  text.insert(text.find('\n') + 1, "{broken\n");
  std::ofstream(corpus(), std::ios::trunc) << text;
  auto r = run_cli({"ingest", "--corpus", corpus(), "--out", out("ing")});
  EXPECT_EQ(r.code, kConfigOrData);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
  r = run_cli({"ingest", "--corpus", corpus(), "--out", out("ing"), "--lenient"});
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("skipped 1 line"), std::string::npos) << r.out;
}

TEST_F(Cli, IngestExternalWithAdapter) {
  const auto doc = dir_.path() / "dstc.json";
  std::ofstream(doc) << R"([{"dialog_id":"q","turns":[{"speaker":"user","text":"hi"},
    {"speaker":"model","text":"yo","annotations":[2,1]}],"ratings":{"overall":[3,4]}}])";
  const auto r = run_cli({"ingest", "--corpus", doc.string(), "--adapter", "dstc9", "--out", out("ext")});
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(r.out, "1 dialogs, 2 turns, 1 labeled turns, 1 rated dialogs\n");
}

TEST_F(Cli, MissingInputIsExit2) {
  const auto r = run_cli({"ingest", "--corpus", out("nope.jsonl"), "--out", out("x")});
  EXPECT_EQ(r.code, kConfigOrData);
  EXPECT_EQ(run_cli({"frobnicate"}).code, kConfigOrData);
  EXPECT_EQ(run_cli({}).code, kConfigOrData);
}

TEST_F(Cli, PipelineComposes) {
  auto r = run_cli({"score", "--corpus", corpus(), "--strategy", "lexicon", "--out", out("s")});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(r.out, "3 scores, 1 missing\n");
  r = run_cli({"aggregate", "--scores", out("s") + "/turn_scores.jsonl", "--scheme", "linear",
               "--out", out("a")});
  ASSERT_EQ(r.code, kOk) << r.err;
  r = run_cli({"correlate", "--corpus", corpus(), "--scores", out("s") + "/turn_scores.jsonl",
               "--dialog-scores", out("a") + "/dialog_scores.jsonl", "--out", out("c")});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto report = json::parse(slurp(out("c") + "/report.json"));
  ASSERT_EQ(report["rows"].size(), 3u);
  std::set<std::string> targets;
  for (const auto& row : report["rows"]) targets.insert(row["target"].get<std::string>());
  EXPECT_EQ(targets, (std::set<std::string>{"3p_turn", "3p_dialog", "1p_dialog"}));
  EXPECT_EQ(slurp(out("c") + "/report.csv").substr(0, 6), "config");
}

TEST_F(Cli, RerunsAreByteIdentical) {
  for (const char* sub : {"r1", "r2"}) {
    ASSERT_EQ(run_cli({"score", "--corpus", corpus(), "--out", out(sub)}).code, kOk);
  }
  EXPECT_EQ(slurp(out("r1") + "/turn_scores.jsonl"), slurp(out("r2") + "/turn_scores.jsonl"));
  EXPECT_EQ(slurp(out("r1") + "/score.manifest.json"), slurp(out("r2") + "/score.manifest.json"));
}

TEST_F(Cli, ConstantTargetsExit4WithUndefinedRow) {
  auto ds = small_corpus();
  for (auto& d : ds) d.first_party_rating = 3.0;
  write_corpus(corpus_, ds);
  ASSERT_EQ(run_cli({"score", "--corpus", corpus(), "--out", out("s")}).code, kOk);
  ASSERT_EQ(run_cli({"aggregate", "--scores", out("s") + "/turn_scores.jsonl", "--out", out("a")}).code,
            kOk);
  const auto r = run_cli({"correlate", "--corpus", corpus(), "--dialog-scores",
                          out("a") + "/dialog_scores.jsonl", "--target", "1p_dialog", "--out", out("c")});
  EXPECT_EQ(r.code, kInsufficientData);
  const auto report = json::parse(slurp(out("c") + "/report.json"));
  EXPECT_EQ(report["rows"][0]["status"], "undefined");
}

TEST_F(Cli, SweepPicksLinearOnRecencyCorpus) {
  write_corpus(corpus_, make_recency_corpus({}, 2024));
  const auto r = run_cli({"sweep", "--corpus", corpus(), "--strategy", "lexicon", "--scheme", "uniform",
                          "--scheme", "linear", "--target", "3p_dialog", "--out", out("sw")});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto report = json::parse(slurp(out("sw") + "/sweep.json"));
  ASSERT_EQ(report["rows"].size(), 2u);
  EXPECT_EQ(report["best"][0]["config"], "lexicon_next_user|linear");
  EXPECT_NE(r.out.find("best 3p_dialog: lexicon_next_user|linear"), std::string::npos) << r.out;
}

TEST_F(Cli, NeuralStrategyNeedsBackend) {
  const auto r = run_cli({"score", "--corpus", corpus(), "--strategy", "nuq", "--out", out("s")});
  EXPECT_EQ(r.code, kConfigOrData);
  EXPECT_NE(r.err.find("endpoint"), std::string::npos) << r.err;
}

TEST_F(Cli, GenerationNeedsSeed) {
  const auto r = run_cli({"score", "--corpus", corpus(), "--strategy", "nug", "--backend-url",
                          "http://127.0.0.1:9", "--out", out("s")});
  EXPECT_EQ(r.code, kConfigOrData);
  EXPECT_NE(r.err.find("--seed"), std::string::npos) << r.err;
}

TEST_F(Cli, BackendFromEnvironmentAndCache) {
  auto stub = std::make_shared<testing::StubBackend>();
  std::vector<std::string> urls;
  Environment env;
  env.make_backend = [&](const std::string& url) -> std::unique_ptr<InferenceBackend> {
    urls.push_back(url);
    struct Forward : testing::StubBackend {
      std::shared_ptr<testing::StubBackend> inner;
      std::string generate(const GenerationRequest& r) override { return inner->generate(r); }
      std::vector<SentimentScore> sentiment(std::span<const std::string> t) override {
        return inner->sentiment(t);
      }
      double turn_quality(const std::vector<Turn>& c) override { return inner->turn_quality(c); }
    };
    auto f = std::make_unique<Forward>();
    f->inner = stub;
    return f;
  };
  ::setenv(kBackendUrlEnv, "http://from-env:1234", 1);
  const std::vector<std::string> args{"score", "--corpus", corpus(), "--strategy", "nug", "--seed", "3",
                                      "--cache-dir", out("cache"), "--out", out("s")};
  auto r = run_cli(args, env);
  ::unsetenv(kBackendUrlEnv);
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(urls, (std::vector<std::string>{"http://from-env:1234"}));
  const auto calls = stub->calls();
  EXPECT_GT(calls, 0u);
  r = run_cli({"score", "--corpus", corpus(), "--strategy", "nug", "--seed", "3", "--backend-url",
               "http://elsewhere:1", "--cache-dir", out("cache"), "--out", out("s2")},
              env);
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(stub->calls(), calls);
  EXPECT_NE(r.out.find(" 0 misses"), std::string::npos) << r.out;
  EXPECT_EQ(slurp(out("s") + "/turn_scores.jsonl"), slurp(out("s2") + "/turn_scores.jsonl"));
}

TEST_F(Cli, TransportFailureIsExit3) {
  Environment env;
  env.make_backend = [](const std::string&) -> std::unique_ptr<InferenceBackend> {
    auto b = std::make_unique<testing::StubBackend>();
    b->fail_quality = true;
    return b;
  };
  const auto r = run_cli({"score", "--corpus", corpus(), "--strategy", "nuq", "--backend-url",
                          "http://down:1", "--out", out("s")},
                         env);
  EXPECT_EQ(r.code, kTransport);
}

TEST_F(Cli, UnreachableHttpBackendIsExit3) {
  const auto r = run_cli({"score", "--corpus", corpus(), "--strategy", "nuq", "--backend-url",
                          "http://127.0.0.1:9", "--out", out("s")});
  EXPECT_EQ(r.code, kTransport) << r.err;
}

TEST_F(Cli, ConfigFileWithCommandLineOverride) {
  const auto cfg = dir_.path() / "run.toml";
  std::ofstream(cfg) << "[aggregate]\nscheme = \"linear\"\nscores = \"" << out("s") + "/turn_scores.jsonl"
                     << "\"\nout = \"" << out("from-file") << "\"\n";
  ASSERT_EQ(run_cli({"score", "--corpus", corpus(), "--out", out("s")}).code, kOk);
  auto r = run_cli({"--config", cfg.string(), "aggregate"});
  ASSERT_EQ(r.code, kOk) << r.err;
  auto m = json::parse(slurp(out("from-file") + "/aggregate.manifest.json"));
  EXPECT_EQ(m["config"]["scheme"], "linear");
  r = run_cli({"--config", cfg.string(), "aggregate", "--scheme", "exp:0.5"});
  ASSERT_EQ(r.code, kOk) << r.err;
  m = json::parse(slurp(out("from-file") + "/aggregate.manifest.json"));
  EXPECT_EQ(m["config"]["scheme"], "exp:0.5");
}

TEST_F(Cli, BootstrapNeedsSeed) {
  ASSERT_EQ(run_cli({"score", "--corpus", corpus(), "--out", out("s")}).code, kOk);
  auto r = run_cli({"correlate", "--corpus", corpus(), "--scores", out("s") + "/turn_scores.jsonl",
                    "--bootstrap", "200", "--out", out("c")});
  EXPECT_EQ(r.code, kConfigOrData);
}

TEST_F(Cli, ExportTrain) {
  auto r = run_cli({"export-train", "--corpus", corpus(), "--label-scheme", "user_stop", "--out", out("t")});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(r.out, "4 examples, 0 skipped\n");
  std::istringstream lines(slurp(out("t") + "/train.jsonl"));
  std::string first;
  std::getline(lines, first);
  const auto j = json::parse(first);
  EXPECT_EQ(j["scheme"], "user_stop");
  EXPECT_EQ(j["dialog_id"], "a");
  r = run_cli({"export-train", "--corpus", corpus(), "--label-scheme", "next_sentiment", "--out", out("t2")});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(r.out, "3 examples, 1 skipped\n");
}

TEST_F(Cli, FeatureReport) {
  write_corpus(corpus_, make_recency_corpus({.dialogs = 30}, 4));
  const auto r = run_cli({"feature-report", "--corpus", corpus(), "--out", out("f")});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto report = json::parse(slurp(out("f") + "/features.json"));
  EXPECT_EQ(report["rows"].size(), 6u);
}

TEST_F(Cli, VersionFlag) {
  const auto r = run_cli({"--version"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("dialeval"), std::string::npos);
}

}  // namespace
}  // namespace dialeval::cli
