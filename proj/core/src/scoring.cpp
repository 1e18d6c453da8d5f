// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "dialeval/scoring.hpp"

#include <atomic>
#include <exception>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <thread>

#include "dialeval/digest.hpp"
#include "dialeval/error.hpp"
#include "json_util.hpp"

namespace dialeval {

using nlohmann::json;

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kNuq: return "nuq";
    case Strategy::kNug: return "nug";
    case Strategy::kNuf: return "nuf";
    case Strategy::kLexiconNextUser: return "lexicon_next_user";
    case Strategy::kOracleNextUserSentiment: return "oracle_next_user_sentiment";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view s) {
  if (s == "nuq") return Strategy::kNuq;
  if (s == "nug") return Strategy::kNug;
  if (s == "nuf") return Strategy::kNuf;
  if (s == "lexicon" || s == "lexicon_next_user") return Strategy::kLexiconNextUser;
  if (s == "oracle" || s == "oracle_next_user_sentiment") {
    return Strategy::kOracleNextUserSentiment;
  }
  throw ConfigError("unknown strategy '" + std::string(s) + "'");
}

bool needs_backend(Strategy s) { return s != Strategy::kLexiconNextUser; }

void ScorerConfig::validate() const {
  const bool neural =
      strategy == Strategy::kNuq || strategy == Strategy::kNug || strategy == Strategy::kNuf;
  if (neural && (!backend_endpoint || backend_endpoint->empty())) {
    throw ConfigError(std::string(to_string(strategy)) + " requires a backend endpoint");
  }
  if (context_window && *context_window == 0) {
    throw ConfigError("context_window must be a positive integer");
  }
  if (generation) {
    if (generation->max_tokens < 1) throw ConfigError("generation.max_tokens must be >= 1");
    if (generation->samples < 1) throw ConfigError("generation.samples must be >= 1");
  }
}

std::string ScorerConfig::descriptor() const {
  std::string d(to_string(strategy));
  if (label_scheme) d += "[" + *label_scheme + "]";
  if (context_window) d += ",w=" + std::to_string(*context_window);
  if (generation && generation->samples > 1) d += ",s=" + std::to_string(generation->samples);
  return d;
}

namespace {

json generation_json(const std::optional<GenerationConfig>& g) {
  if (!g) return nullptr;
  return {{"max_tokens", g->max_tokens},
          {"seed", g->seed ? json(*g->seed) : json(nullptr)},
          {"samples", g->samples}};
}

json hashed_fields(const ScorerConfig& cfg) {
  return {{"strategy", to_string(cfg.strategy)},
          {"context_window", cfg.context_window ? json(*cfg.context_window) : json(nullptr)},
          {"generation", generation_json(cfg.generation)},
          {"label_scheme", cfg.label_scheme ? json(*cfg.label_scheme) : json(nullptr)}};
}

}  // namespace

json ScorerConfig::to_json() const {
  json j = hashed_fields(*this);
  j["backend_endpoint"] = backend_endpoint ? json(*backend_endpoint) : json(nullptr);
  return j;
}

ScorerConfig parse_scorer_spec(std::string_view spec) {
  ScorerConfig cfg;
  std::string_view head = spec;
  if (auto at = spec.find('@'); at != std::string_view::npos) {
    cfg.backend_endpoint = std::string(spec.substr(at + 1));
    head = spec.substr(0, at);
  }
  if (auto colon = head.find(':'); colon != std::string_view::npos) {
    cfg.label_scheme = std::string(head.substr(colon + 1));
    head = head.substr(0, colon);
  }
  cfg.strategy = parse_strategy(head);
  return cfg;
}

std::string config_hash(const ScorerConfig& cfg, const Lexicon* lexicon) {
  json j = hashed_fields(cfg);
  if (cfg.strategy == Strategy::kLexiconNextUser) {
    j["lexicon"] = (lexicon ? *lexicon : Lexicon::builtin()).digest();
  }
  return sha256_hex(j.dump()).substr(0, 16);
}

namespace {

double checked_quality(double q, std::string_view what) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw ProtocolError(std::string(what) + " out of [0,1]: " + json(q).dump());
  }
  return q;
}

double checked_sentiment_quality(const SentimentScore& s) {
  if (!(s.value >= -1.0 && s.value <= 1.0)) {
    throw ProtocolError("sentiment value out of [-1,1]: " + json(s.value).dump());
  }
  return sentiment_to_quality(s);
}

class TurnScorer {
 public:
  TurnScorer(const ScorerConfig& cfg, const ScorerResources& res)
      : cfg_(cfg), res_(res) {
    cfg_.validate();
    if (!res_.lexicon) res_.lexicon = &Lexicon::builtin();
    if (needs_backend(cfg_.strategy) && !res_.backend) {
      throw ConfigError(std::string(to_string(cfg_.strategy)) + " needs an inference backend");
    }
    scorer_id_ = std::string(to_string(cfg_.strategy));
    hash_ = config_hash(cfg_, res_.lexicon);
  }

  const ScorerConfig& config() const { return cfg_; }
  const std::string& scorer_id() const { return scorer_id_; }
  const std::string& hash() const { return hash_; }

  std::optional<TurnScore> score(const DialogContext& ctx, const Dialog& dialog,
                                 ScoreCache* cache) const {
    std::optional<Turn> next;
    const bool uses_next_user = cfg_.strategy == Strategy::kLexiconNextUser ||
                                cfg_.strategy == Strategy::kOracleNextUserSentiment;
    if (uses_next_user) {
      next = next_user_turn(dialog, ctx.target_index);
      if (!next) return std::nullopt;
    }

    std::string key;
    if (cache) {
      json material = {{"context", context_to_json(ctx)},
                       {"next_user", next ? json(next->text) : json(nullptr)}};
      key = ScoreCache::make_key(scorer_id_, hash_, material.dump());
      if (auto hit = cache->get(key)) {
        TurnScore s = turn_score_from_json(*hit);
        s.dialog_id = ctx.dialog_id;
        s.target_index = ctx.target_index;
        return s;
      }
    }

    TurnScore s;
    s.dialog_id = ctx.dialog_id;
    s.target_index = ctx.target_index;
    s.scorer_id = scorer_id_;
    s.config_hash = hash_;
    switch (cfg_.strategy) {
      case Strategy::kNuq:
        s.quality = checked_quality(res_.backend->turn_quality(ctx.turns), "turn quality");
        break;
      case Strategy::kNug:
      case Strategy::kNuf:
        generate_and_score(ctx, s);
        break;
      case Strategy::kLexiconNextUser:
        s.quality = sentiment_to_quality(lexicon_sentiment(next->text, *res_.lexicon));
        break;
      case Strategy::kOracleNextUserSentiment: {
        BackendSentimentScorer scorer(*res_.backend);
        s.quality = checked_sentiment_quality(scorer.score_one(next->text));
        break;
      }
    }
    if (cache) cache->put(key, to_json(s));
    return s;
  }

 private:
  void generate_and_score(const DialogContext& ctx, TurnScore& s) const {
    const GenerationConfig gen = cfg_.generation.value_or(GenerationConfig{});
    BackendSentimentScorer scorer(*res_.backend);
    double total = 0.0;
    for (int i = 0; i < gen.samples; ++i) {
      GenerationRequest req;
      req.context = ctx.turns;
      req.mode = cfg_.strategy == Strategy::kNuf ? GenerationMode::kFeedback
                                                 : GenerationMode::kNextUser;
      req.max_tokens = gen.max_tokens;
      if (gen.seed) req.seed = *gen.seed + i;
      std::string text = res_.backend->generate(req);
      total += checked_sentiment_quality(scorer.score_one(text));
      if (i == 0) s.generated_text = std::move(text);
    }
    s.quality = total / gen.samples;
  }

  ScorerConfig cfg_;
  ScorerResources res_;
  std::string scorer_id_;
  std::string hash_;
};

[[noreturn]] void rethrow_with_prefix(const std::string& prefix) {
  try {
    throw;
  } catch (const TransportError& e) {
    throw TransportError(prefix, e);
  } catch (const ProtocolError& e) {
    throw ProtocolError(prefix + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  } catch (const DataError& e) {
    throw DataError(prefix + e.what());
  }
}

struct DialogResult {
  std::vector<TurnScore> scores;
  std::vector<MissingScore> missing;
};

}  // namespace

std::optional<TurnScore> score_turn(const DialogContext& ctx, const ScorerConfig& cfg,
                                    const Dialog& dialog, const ScorerResources& res) {
  return TurnScorer(cfg, res).score(ctx, dialog, nullptr);
}

ScoreRun score_corpus(std::span<const Dialog> dialogs, const ScorerConfig& cfg,
                      const ScorerResources& res, ScoreCache* cache,
                      const ScoreOptions& opts) {
  std::unique_ptr<BoundedBackend> bounded;
  ScorerResources effective = res;
  if (res.backend) {
    bounded = std::make_unique<BoundedBackend>(*res.backend, std::max<std::size_t>(1, opts.max_in_flight));
    effective.backend = bounded.get();
  }
  const TurnScorer scorer(cfg, effective);

  std::vector<DialogResult> results(dialogs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mu;

  auto worker = [&] {
    for (std::size_t i = next++; i < dialogs.size() && !failed; i = next++) {
      const Dialog& d = dialogs[i];
      std::size_t turn = 0;
      try {
        for (const DialogContext& ctx : system_turn_contexts(d, cfg.context_window)) {
          turn = ctx.target_index;
          if (auto s = scorer.score(ctx, d, cache)) {
            results[i].scores.push_back(std::move(*s));
          } else {
            results[i].missing.push_back({d.id, ctx.target_index, scorer.scorer_id(),
                                          scorer.hash(), std::string(kNoNextUserTurn)});
          }
        }
      } catch (const Error&) {
        std::lock_guard lock(error_mu);
        if (!first_error) {
          try {
            rethrow_with_prefix("dialog '" + d.id + "' turn " + std::to_string(turn) + ": ");
          } catch (...) {
            first_error = std::current_exception();
          }
        }
        failed = true;
      }
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(opts.jobs, dialogs.size()));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);

  ScoreRun run;
  run.dialog_order.reserve(dialogs.size());
  for (std::size_t i = 0; i < dialogs.size(); ++i) {
    run.dialog_order.push_back(dialogs[i].id);
    for (auto& s : results[i].scores) run.scores.push_back(std::move(s));
    for (auto& m : results[i].missing) run.missing.push_back(std::move(m));
  }
  return run;
}

json to_json(const TurnScore& s) {
  return {{"dialog_id", s.dialog_id},
          {"target_index", s.target_index},
          {"quality", s.quality},
          {"scorer_id", s.scorer_id},
          {"config_hash", s.config_hash},
          {"generated_text", s.generated_text ? json(*s.generated_text) : json(nullptr)}};
}

json to_json(const MissingScore& m) {
  return {{"dialog_id", m.dialog_id},   {"target_index", m.target_index},
          {"quality", nullptr},         {"scorer_id", m.scorer_id},
          {"config_hash", m.config_hash}, {"missing", m.reason}};
}

namespace {

std::string string_field(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw DataError(std::string("score record: missing string field '") + key + "'");
  }
  return j[key].get<std::string>();
}

std::size_t index_field(const json& j) {
  if (!j.contains("target_index") || !detail::is_count(j["target_index"])) {
    throw DataError("score record: missing non-negative integer 'target_index'");
  }
  return j["target_index"].get<std::size_t>();
}

}  // namespace

TurnScore turn_score_from_json(const json& j) {
  if (!j.is_object()) throw DataError("score record must be an object");
  TurnScore s;
  s.dialog_id = string_field(j, "dialog_id");
  s.target_index = index_field(j);
  if (!j.contains("quality") || !j["quality"].is_number()) {
    throw DataError("score record: missing numeric 'quality'");
  }
  s.quality = j["quality"].get<double>();
  if (!(s.quality >= 0.0 && s.quality <= 1.0)) {
    throw DataError("score record: quality out of [0,1]");
  }
  s.scorer_id = string_field(j, "scorer_id");
  s.config_hash = string_field(j, "config_hash");
  if (j.contains("generated_text") && j["generated_text"].is_string()) {
    s.generated_text = j["generated_text"].get<std::string>();
  }
  return s;
}

void write_score_run(std::ostream& out, const ScoreRun& run) {
  std::vector<std::string> order = run.dialog_order;
  std::set<std::string> known(order.begin(), order.end());
  std::map<std::string, std::map<std::size_t, json>> by_dialog;
  auto add = [&](const std::string& id, std::size_t idx, json j) {
    if (known.insert(id).second) order.push_back(id);
    by_dialog[id][idx] = std::move(j);
  };
  for (const auto& s : run.scores) add(s.dialog_id, s.target_index, to_json(s));
  for (const auto& m : run.missing) add(m.dialog_id, m.target_index, to_json(m));
  for (const auto& id : order) {
    auto it = by_dialog.find(id);
    if (it == by_dialog.end()) continue;
    for (const auto& [idx, j] : it->second) out << j.dump() << '\n';
  }
}

ScoreRun read_score_run(std::istream& in) {
  ScoreRun run;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      if (!j.is_object()) throw DataError("score record must be an object");
      std::string id = string_field(j, "dialog_id");
      if (seen.insert(id).second) run.dialog_order.push_back(id);
      if (j.contains("missing") && j["missing"].is_string()) {
        run.missing.push_back({std::move(id), index_field(j), string_field(j, "scorer_id"),
                               string_field(j, "config_hash"),
                               j["missing"].get<std::string>()});
      } else {
        run.scores.push_back(turn_score_from_json(j));
      }
    } catch (const json::parse_error& e) {
      throw DataError("scores line " + std::to_string(lineno) + ": malformed JSON: " +
                      e.what());
    } catch (const DataError& e) {
      throw DataError("scores line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return run;
}

}  // namespace dialeval
