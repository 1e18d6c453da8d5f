// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "dialeval/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "dialeval/aggregation.hpp"
#include "dialeval/digest.hpp"
#include "dialeval/error.hpp"
#include "dialeval/evaluation.hpp"
#include "dialeval/http_backend.hpp"
#include "dialeval/ingestion.hpp"
#include "dialeval/scoring.hpp"

#ifndef DIALEVAL_VERSION
#define DIALEVAL_VERSION "0.0.0"
#endif

namespace dialeval::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kCodeVersion = "dialeval " DIALEVAL_VERSION;

// ---------------------------------------------------------------------------
// Options shared by several subcommands.

struct BackendOptions {
  std::string url;
  std::string cache_dir;
  std::size_t jobs = 1;
  std::size_t max_in_flight = 4;
};

struct SentimentOptions {
  std::string source = "lexicon";
  std::string lexicon_path;
};

struct IngestOptions {
  std::string corpus;
  std::string adapter = "canonical";
  std::string mapping;
  std::string scale;
  std::string annotations;
  std::string out;
  bool lenient = false;
};

struct ScoreOptionsCli {
  std::string corpus;
  std::string strategy = "lexicon";
  std::string out;
  std::optional<std::int64_t> seed;
  int max_tokens = 32;
  int samples = 1;
  std::size_t context_window = 0;
  std::string lexicon_path;
  bool lenient = false;
  BackendOptions backend;
};

struct AggregateOptions {
  std::string scores;
  std::string scheme = "uniform";
  std::string out;
};

struct CorrelateOptions {
  std::string corpus;
  std::string scores;
  std::string dialog_scores;
  std::vector<std::string> targets;
  std::string pooling = "pooled";
  std::size_t bootstrap = 0;
  std::optional<std::int64_t> seed;
  std::string out;
  bool lenient = false;
};

struct SweepOptionsCli {
  std::string corpus;
  std::vector<std::string> strategies{"lexicon"};
  std::vector<std::string> schemes{"uniform", "linear", "exp:0.9"};
  std::vector<std::string> targets{"3p_dialog"};
  std::string pooling = "pooled";
  std::size_t bootstrap = 0;
  std::optional<std::int64_t> seed;
  int max_tokens = 32;
  std::size_t context_window = 0;
  std::string lexicon_path;
  std::string out;
  bool lenient = false;
  BackendOptions backend;
};

struct ExportOptions {
  std::string corpus;
  std::string label_scheme = "annotation";
  std::size_t context_window = 0;
  std::string out;
  bool lenient = false;
  SentimentOptions sentiment;
  std::string backend_url;
};

struct FeatureOptions {
  std::string corpus;
  std::size_t bootstrap = 0;
  std::optional<std::int64_t> seed;
  std::string out;
  bool lenient = false;
  SentimentOptions sentiment;
  std::string backend_url;
};

// ---------------------------------------------------------------------------
// Helpers

/// Everything a command writes; collects output digests for the manifest.
class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : dir_(dir) {
    if (dir.empty()) throw ConfigError("--out is required");
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir);
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write " + (dir_ / name).string());
    f << content;
    if (!content.empty() && content.back() != '\n') f << '\n';
    f.close();
    outputs_[name] = sha256_file(dir_ / name);
  }

  void write_manifest(const std::string& command, const json& config, const json& seeds,
                      const json& inputs) {
    json m = {{"command", command},
              {"code_version", kCodeVersion},
              {"config", config},
              {"config_hash", sha256_hex(config.dump())},
              {"seeds", seeds},
              {"inputs", inputs},
              {"outputs", outputs_}};
    write(command + ".manifest.json", m.dump(2));
  }

 private:
  fs::path dir_;
  std::map<std::string, std::string> outputs_;
};

json input_entry(const std::string& path) {
  return {{"name", fs::path(path).filename().string()}, {"sha256", sha256_file(path)}};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Dialog> load_corpus(const std::string& path, bool lenient, std::ostream& err) {
  if (path.empty()) throw ConfigError("--corpus is required");
  auto res = load_canonical_file(path, {lenient});
  for (const auto& e : res.errors) err << "skipped line " << e.line << ": " << e.message << '\n';
  return std::move(res.dialogs);
}

std::optional<std::size_t> window_opt(std::size_t w) {
  return w == 0 ? std::nullopt : std::optional<std::size_t>(w);
}

json seed_json(const std::optional<std::int64_t>& s) { return s ? json(*s) : json(nullptr); }

class BackendPool {
 public:
  BackendPool(const Environment& env, std::string default_url)
      : env_(env), default_url_(std::move(default_url)) {}

  InferenceBackend* get(const std::optional<std::string>& url) {
    const std::string u = url && !url->empty() ? *url : default_url_;
    if (u.empty()) throw ConfigError("a backend URL is required (--backend-url or " +
                                     std::string(kBackendUrlEnv) + ")");
    auto it = backends_.find(u);
    if (it == backends_.end()) {
      auto b = env_.make_backend ? env_.make_backend(u) : std::make_unique<HttpBackend>(u);
      it = backends_.emplace(u, std::move(b)).first;
    }
    return it->second.get();
  }

  const std::string& default_url() const { return default_url_; }

 private:
  const Environment& env_;
  std::string default_url_;
  std::map<std::string, std::unique_ptr<InferenceBackend>> backends_;
};

const Lexicon& load_lexicon(const std::string& path, std::optional<Lexicon>& storage) {
  if (path.empty()) return Lexicon::builtin();
  storage = Lexicon::from_file(path);
  return *storage;
}

ScorerConfig scorer_from_spec(const std::string& spec, const std::string& default_url,
                              std::optional<std::int64_t> seed, int max_tokens, int samples,
                              std::size_t window) {
  ScorerConfig cfg = parse_scorer_spec(spec);
  if (needs_backend(cfg.strategy) && !cfg.backend_endpoint && !default_url.empty()) {
    cfg.backend_endpoint = default_url;
  }
  cfg.context_window = window_opt(window);
  if (cfg.strategy == Strategy::kNug || cfg.strategy == Strategy::kNuf) {
    if (!seed) throw ConfigError(std::string(to_string(cfg.strategy)) + " needs --seed");
    cfg.generation = GenerationConfig{max_tokens, seed, samples};
  }
  cfg.validate();
  return cfg;
}

/// Config without locations, so manifests compare equal across directories.
json scorer_manifest_json(const ScorerConfig& cfg) {
  json j = cfg.to_json();
  j.erase("backend_endpoint");
  return j;
}

std::string report_csv(const CorrelationReport& r) {
  std::ostringstream ss;
  write_report_csv(ss, r);
  return ss.str();
}

bool all_rows_ok(const CorrelationReport& r) {
  return std::all_of(r.rows.begin(), r.rows.end(),
                     [](const ReportRow& row) { return row.status == RowStatus::kOk; });
}

void print_rows(std::ostream& out, const CorrelationReport& r) {
  for (const auto& row : r.rows) {
    out << row.target << "  " << row.config << "  ";
    if (row.r_pearson) {
      out << "r=" << format_number(*row.r_pearson);
    } else {
      out << to_string(row.status);
    }
    out << "  n=" << row.n << '\n';
  }
}

EvalOptions eval_options(std::size_t bootstrap, const std::optional<std::int64_t>& seed) {
  if (bootstrap > 0 && !seed) throw ConfigError("--bootstrap needs --seed");
  EvalOptions o;
  o.bootstrap_resamples = bootstrap;
  o.seed = seed ? static_cast<std::uint64_t>(*seed) : 0;
  return o;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_ingest(const IngestOptions& o, std::ostream& out, std::ostream& err) {
  if (o.corpus.empty()) throw ConfigError("--corpus is required");
  OutputDir dir(o.out);
  std::vector<Dialog> dialogs;
  std::size_t skipped = 0;
  json inputs = {{"corpus", input_entry(o.corpus)}};
  std::string scale_name = o.scale;
  if (o.adapter == "canonical" && o.mapping.empty()) {
    auto res = load_canonical_file(o.corpus, {o.lenient});
    for (const auto& e : res.errors) err << "skipped line " << e.line << ": " << e.message << '\n';
    skipped = res.errors.size();
    dialogs = std::move(res.dialogs);
  } else {
    FieldMapping mapping = o.mapping.empty() ? FieldMapping::builtin(o.adapter)
                                             : FieldMapping::from_file(o.mapping);
    if (!o.mapping.empty()) inputs["mapping"] = input_entry(o.mapping);
    if (scale_name.empty()) scale_name = o.adapter == "dstc9" ? "like012" : "binary01";
    const LabelScale scale = parse_label_scale(scale_name);
    dialogs = adapt_external(parse_document(read_file(o.corpus)), mapping, scale);
    if (!o.annotations.empty()) {
      merge_turn_annotations(dialogs, parse_document(read_file(o.annotations)), mapping, scale);
      inputs["annotations"] = input_entry(o.annotations);
    }
  }

  std::size_t turns = 0, labeled = 0, rated = 0;
  for (const auto& d : dialogs) {
    turns += d.turns.size();
    for (const auto& t : d.turns) labeled += t.quality_label ? 1 : 0;
    rated += (d.first_party_rating || !d.third_party_ratings.empty()) ? 1 : 0;
  }
  std::ostringstream corpus;
  write_canonical(corpus, dialogs);
  dir.write("corpus.jsonl", corpus.str());
  dir.write_manifest("ingest",
                     {{"adapter", o.mapping.empty() ? o.adapter : "mapping"},
                      {"scale", scale_name},
                      {"lenient", o.lenient}},
                     json::object(), inputs);
  out << dialogs.size() << " dialogs, " << turns << " turns, " << labeled << " labeled turns, "
      << rated << " rated dialogs\n";
  if (o.lenient) out << "skipped " << skipped << " line(s)\n";
  return kOk;
}

int cmd_score(const ScoreOptionsCli& o, const Environment& env, std::ostream& out,
              std::ostream& err) {
  auto dialogs = load_corpus(o.corpus, o.lenient, err);
  OutputDir dir(o.out);
  std::optional<Lexicon> lex_storage;
  const Lexicon& lexicon = load_lexicon(o.lexicon_path, lex_storage);
  const ScorerConfig cfg = scorer_from_spec(o.strategy, o.backend.url, o.seed, o.max_tokens,
                                            o.samples, o.context_window);
  BackendPool pool(env, o.backend.url);
  ScorerResources res;
  res.lexicon = &lexicon;
  if (needs_backend(cfg.strategy)) res.backend = pool.get(cfg.backend_endpoint);
  std::optional<ScoreCache> cache;
  if (!o.backend.cache_dir.empty()) cache.emplace(o.backend.cache_dir);

  ScoreOptions so;
  so.jobs = o.backend.jobs;
  so.max_in_flight = o.backend.max_in_flight;
  const ScoreRun run = score_corpus(dialogs, cfg, res, cache ? &*cache : nullptr, so);

  std::ostringstream ss;
  write_score_run(ss, run);
  dir.write("turn_scores.jsonl", ss.str());
  json inputs = {{"corpus", input_entry(o.corpus)}};
  if (!o.lexicon_path.empty()) inputs["lexicon"] = input_entry(o.lexicon_path);
  dir.write_manifest("score",
                     {{"scorer", scorer_manifest_json(cfg)},
                      {"scorer_config_hash", config_hash(cfg, &lexicon)},
                      {"jobs", o.backend.jobs}},
                     {{"generation", seed_json(o.seed)}}, inputs);
  out << run.scores.size() << " scores, " << run.missing.size() << " missing\n";
  if (cache) out << "cache: " << cache->hits() << " hits, " << cache->misses() << " misses\n";
  return kOk;
}

int cmd_aggregate(const AggregateOptions& o, std::ostream& out, std::ostream& err) {
  if (o.scores.empty()) throw ConfigError("--scores is required");
  const WeightScheme scheme = parse_weight_scheme(o.scheme);
  OutputDir dir(o.out);
  std::ifstream in(o.scores);
  if (!in) throw DataError("cannot read " + o.scores);
  const ScoreRun run = read_score_run(in);
  const AggregateRun agg = aggregate_run(run, scheme);
  for (const auto& id : agg.unscorable) {
    err << "dialog '" << id << "': no non-missing turn scores, skipped\n";
  }
  std::ostringstream ss;
  for (const auto& s : agg.scores) ss << to_json(s).dump() << '\n';
  dir.write("dialog_scores.jsonl", ss.str());
  dir.write_manifest("aggregate", {{"scheme", scheme.to_string()}}, json::object(),
                     {{"scores", input_entry(o.scores)}});
  out << agg.scores.size() << " dialog scores, " << agg.unscorable.size() << " unscorable\n";
  if (agg.scores.empty()) {
    err << "error: insufficient data: no dialog could be aggregated\n";
    return kInsufficientData;
  }
  return kOk;
}

std::vector<DialogScore> read_dialog_scores(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path);
  std::vector<DialogScore> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(dialog_score_from_json(json::parse(line)));
    } catch (const json::parse_error& e) {
      throw DataError(path + " line " + std::to_string(n) + ": malformed JSON");
    } catch (const DataError& e) {
      throw DataError(path + " line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

int cmd_correlate(const CorrelateOptions& o, std::ostream& out, std::ostream& err) {
  if (o.scores.empty() && o.dialog_scores.empty()) {
    throw ConfigError("correlate needs --scores and/or --dialog-scores");
  }
  auto dialogs = load_corpus(o.corpus, o.lenient, err);
  const Pooling pooling = parse_pooling(o.pooling);
  const EvalOptions eo = eval_options(o.bootstrap, o.seed);
  std::vector<Target> targets;
  for (const auto& t : o.targets) targets.push_back(parse_target(t));
  if (targets.empty()) {
    if (!o.scores.empty()) targets.push_back(Target::kThirdPartyTurn);
    if (!o.dialog_scores.empty()) {
      targets.push_back(Target::kThirdPartyDialog);
      targets.push_back(Target::kFirstPartyDialog);
    }
  }
  OutputDir dir(o.out);
  json inputs = {{"corpus", input_entry(o.corpus)}};

  CorrelationReport report;
  auto add_row = [&](ReportRow row, auto&& evaluate) {
    try {
      auto ev = evaluate();
      ev.row.label_scheme = row.label_scheme;
      report.rows.push_back(std::move(ev.row));
    } catch (const InsufficientDataError& e) {
      row.status = RowStatus::kInsufficient;
      row.note = e.what();
      report.rows.push_back(std::move(row));
    }
  };

  if (std::find(targets.begin(), targets.end(), Target::kThirdPartyTurn) != targets.end()) {
    if (o.scores.empty()) throw ConfigError("target 3p_turn needs --scores");
    std::ifstream in(o.scores);
    if (!in) throw DataError("cannot read " + o.scores);
    const ScoreRun run = read_score_run(in);
    inputs["scores"] = input_entry(o.scores);
    std::map<std::pair<std::string, std::string>, std::vector<TurnScore>> groups;
    for (const auto& s : run.scores) groups[{s.scorer_id, s.config_hash}].push_back(s);
    if (groups.empty()) groups[{"", ""}];
    for (const auto& [key, scores] : groups) {
      ReportRow row;
      row.scorer = key.first;
      row.scheme = "-";
      row.target = to_string(Target::kThirdPartyTurn);
      row.pooling = to_string(pooling);
      row.config = row.scorer + "|" + row.scheme;
      add_row(row, [&] { return evaluate_turn_level(scores, dialogs, pooling, eo); });
    }
  }
  std::vector<DialogScore> dscores;
  if (!o.dialog_scores.empty()) {
    dscores = read_dialog_scores(o.dialog_scores);
    inputs["dialog_scores"] = input_entry(o.dialog_scores);
  }
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<DialogScore>> dgroups;
  for (const auto& s : dscores) dgroups[{s.scorer_id, s.config_hash, s.scheme.to_string()}].push_back(s);
  for (Target t : targets) {
    if (t == Target::kThirdPartyTurn) continue;
    if (o.dialog_scores.empty()) throw ConfigError(std::string(to_string(t)) + " needs --dialog-scores");
    const auto dt = t == Target::kFirstPartyDialog ? DialogTarget::kFirstParty
                                                   : DialogTarget::kThirdPartyMean;
    if (dgroups.empty()) dgroups[{"", "", "-"}];
    for (const auto& [key, scores] : dgroups) {
      ReportRow row;
      row.scorer = std::get<0>(key);
      row.scheme = std::get<2>(key);
      row.target = to_string(t);
      row.pooling = "-";
      row.config = row.scorer + "|" + row.scheme;
      add_row(row, [&] { return evaluate_dialog_level(scores, dialogs, dt, eo); });
    }
  }
  report.best = select_best(report.rows);

  dir.write("report.csv", report_csv(report));
  dir.write("report.json", report_to_json(report).dump(2));
  json targets_json = json::array();
  for (Target t : targets) targets_json.push_back(to_string(t));
  dir.write_manifest("correlate",
                     {{"targets", targets_json},
                      {"pooling", to_string(pooling)},
                      {"bootstrap", o.bootstrap}},
                     {{"bootstrap", seed_json(o.seed)}}, inputs);
  print_rows(out, report);
  if (!all_rows_ok(report)) {
    err << "error: one or more correlations are undefined or lack data (see report)\n";
    return kInsufficientData;
  }
  return kOk;
}

int cmd_sweep(const SweepOptionsCli& o, const Environment& env, std::ostream& out,
              std::ostream& err) {
  auto dialogs = load_corpus(o.corpus, o.lenient, err);
  std::optional<Lexicon> lex_storage;
  const Lexicon& lexicon = load_lexicon(o.lexicon_path, lex_storage);
  std::vector<ScorerConfig> scorers;
  for (const auto& s : o.strategies) {
    scorers.push_back(scorer_from_spec(s, o.backend.url, o.seed, o.max_tokens, 1, o.context_window));
  }
  std::vector<WeightScheme> schemes;
  for (const auto& s : o.schemes) schemes.push_back(parse_weight_scheme(s));
  std::vector<Target> targets;
  for (const auto& t : o.targets) targets.push_back(parse_target(t));

  SweepOptions so;
  so.pooling = parse_pooling(o.pooling);
  so.eval = eval_options(o.bootstrap, o.seed);
  so.scoring.jobs = o.backend.jobs;
  so.scoring.max_in_flight = o.backend.max_in_flight;

  OutputDir dir(o.out);
  BackendPool pool(env, o.backend.url);
  std::optional<ScoreCache> cache;
  if (!o.backend.cache_dir.empty()) cache.emplace(o.backend.cache_dir);
  SweepResources res;
  res.lexicon = &lexicon;
  res.cache = cache ? &*cache : nullptr;
  res.backend_for = [&](const ScorerConfig& cfg) -> InferenceBackend* {
    return needs_backend(cfg.strategy) ? pool.get(cfg.backend_endpoint) : nullptr;
  };
  const CorrelationReport report = sweep(dialogs, scorers, schemes, targets, res, so);

  dir.write("sweep.csv", report_csv(report));
  dir.write("sweep.json", report_to_json(report).dump(2));
  json scorer_json = json::array();
  for (const auto& s : scorers) scorer_json.push_back(scorer_manifest_json(s));
  json inputs = {{"corpus", input_entry(o.corpus)}};
  if (!o.lexicon_path.empty()) inputs["lexicon"] = input_entry(o.lexicon_path);
  dir.write_manifest("sweep",
                     {{"scorers", scorer_json},
                      {"schemes", o.schemes},
                      {"targets", o.targets},
                      {"pooling", o.pooling},
                      {"bootstrap", o.bootstrap}},
                     {{"seed", seed_json(o.seed)}}, inputs);
  print_rows(out, report);
  for (const auto& b : report.best) {
    out << "best " << b.target << ": " << b.config << " r=" << format_number(b.r_pearson);
    if (!b.tied_with.empty()) out << " (tied with " << b.tied_with.size() << ")";
    out << '\n';
  }
  if (report.best.empty()) {
    err << "error: no configuration produced a defined correlation\n";
    return kInsufficientData;
  }
  return kOk;
}

std::unique_ptr<SentimentScorer> make_sentiment(const SentimentOptions& o, const Lexicon& lexicon,
                                                BackendPool& pool) {
  if (o.source == "lexicon") return std::make_unique<LexiconSentimentScorer>(lexicon);
  if (o.source == "backend") return std::make_unique<BackendSentimentScorer>(*pool.get(std::nullopt));
  throw ConfigError("--sentiment must be 'lexicon' or 'backend'");
}

int cmd_export_train(const ExportOptions& o, const Environment& env, std::ostream& out,
                     std::ostream& err) {
  auto dialogs = load_corpus(o.corpus, o.lenient, err);
  const LabelScheme scheme = parse_label_scheme(o.label_scheme);
  OutputDir dir(o.out);
  std::optional<Lexicon> lex_storage;
  const Lexicon& lexicon = load_lexicon(o.sentiment.lexicon_path, lex_storage);
  BackendPool pool(env, o.backend_url);
  std::unique_ptr<SentimentScorer> sentiment;
  if (scheme == LabelScheme::kNextSentiment) sentiment = make_sentiment(o.sentiment, lexicon, pool);
  const auto res = export_training_examples(dialogs, scheme, sentiment.get(), window_opt(o.context_window));
  std::ostringstream ss;
  for (const auto& e : res.examples) ss << to_json(e).dump() << '\n';
  dir.write("train.jsonl", ss.str());
  json inputs = {{"corpus", input_entry(o.corpus)}};
  if (!o.sentiment.lexicon_path.empty()) inputs["lexicon"] = input_entry(o.sentiment.lexicon_path);
  dir.write_manifest("export-train",
                     {{"label_scheme", to_string(scheme)},
                      {"sentiment", o.sentiment.source},
                      {"context_window", o.context_window}},
                     json::object(), inputs);
  out << res.examples.size() << " examples, " << res.skipped << " skipped\n";
  return kOk;
}

int cmd_feature_report(const FeatureOptions& o, const Environment& env, std::ostream& out,
                       std::ostream& err) {
  auto dialogs = load_corpus(o.corpus, o.lenient, err);
  const EvalOptions eo = eval_options(o.bootstrap, o.seed);
  OutputDir dir(o.out);
  std::optional<Lexicon> lex_storage;
  const Lexicon& lexicon = load_lexicon(o.sentiment.lexicon_path, lex_storage);
  BackendPool pool(env, o.backend_url);
  auto sentiment = make_sentiment(o.sentiment, lexicon, pool);
  const CorrelationReport report = feature_report(dialogs, *sentiment, eo);
  dir.write("features.csv", report_csv(report));
  dir.write("features.json", report_to_json(report).dump(2));
  json inputs = {{"corpus", input_entry(o.corpus)}};
  if (!o.sentiment.lexicon_path.empty()) inputs["lexicon"] = input_entry(o.sentiment.lexicon_path);
  dir.write_manifest("feature-report",
                     {{"sentiment", o.sentiment.source}, {"bootstrap", o.bootstrap}},
                     {{"bootstrap", seed_json(o.seed)}}, inputs);
  print_rows(out, report);
  if (report.best.empty()) {
    err << "error: no feature produced a defined correlation\n";
    return kInsufficientData;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// Option wiring

void add_backend_flags(CLI::App* sub, BackendOptions& b) {
  sub->add_option("--backend-url", b.url, "Inference backend base URL")->envname(kBackendUrlEnv);
  sub->add_option("--cache-dir", b.cache_dir, "Directory of the turn-score cache");
  sub->add_option("--jobs", b.jobs, "Dialogs scored concurrently")->check(CLI::PositiveNumber);
  sub->add_option("--max-in-flight", b.max_in_flight, "Concurrent backend requests")
      ->check(CLI::PositiveNumber);
}

void add_sentiment_flags(CLI::App* sub, SentimentOptions& s, std::string& url) {
  sub->add_option("--sentiment", s.source, "Sentiment source: lexicon or backend")
      ->check(CLI::IsMember({"lexicon", "backend"}));
  sub->add_option("--lexicon", s.lexicon_path, "Lexicon JSON (default: builtin)");
  sub->add_option("--backend-url", url, "Inference backend base URL")->envname(kBackendUrlEnv);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const Environment& env) {
  CLI::App app{"Dialog evaluation harness: score system turns from next-user signals, "
               "aggregate to dialog scores and correlate with human ratings."};
  app.name("dialeval");
  app.set_config("--config", "", "TOML config file (command-line flags take precedence)");
  app.set_version_flag("--version", kCodeVersion);
  app.require_subcommand(1);
  app.fallthrough();

  std::function<int()> action;

  IngestOptions ingest;
  auto* s_ingest = app.add_subcommand("ingest", "Load a corpus and write canonical JSONL");
  s_ingest->add_option("--corpus", ingest.corpus, "Input corpus file")->required();
  s_ingest->add_option("--adapter", ingest.adapter, "canonical, fed or dstc9")
      ->check(CLI::IsMember({"canonical", "fed", "dstc9"}));
  s_ingest->add_option("--mapping", ingest.mapping, "Field mapping JSON for external corpora");
  s_ingest->add_option("--scale", ingest.scale, "Turn label scale: binary01, like012, rating15");
  s_ingest->add_option("--annotations", ingest.annotations, "Separate turn annotation file");
  s_ingest->add_option("--out", ingest.out, "Output directory")->required();
  s_ingest->add_flag("--lenient", ingest.lenient, "Skip malformed lines instead of failing");
  s_ingest->callback([&] { action = [&] { return cmd_ingest(ingest, out, err); }; });

  ScoreOptionsCli score;
  auto* s_score = app.add_subcommand("score", "Score every system turn of a corpus");
  s_score->add_option("--corpus", score.corpus, "Canonical corpus")->required();
  s_score->add_option("--strategy", score.strategy,
                      "nuq|nug|nuf|lexicon|oracle[:label_scheme][@url]");
  s_score->add_option("--out", score.out, "Output directory")->required();
  s_score->add_option("--seed", score.seed, "Generation seed (required for nug/nuf)");
  s_score->add_option("--max-tokens", score.max_tokens, "Generation length cap")
      ->check(CLI::PositiveNumber);
  s_score->add_option("--samples", score.samples, "Generations averaged per turn")
      ->check(CLI::PositiveNumber);
  s_score->add_option("--context-window", score.context_window, "Trailing turns of context (0 = all)");
  s_score->add_option("--lexicon", score.lexicon_path, "Lexicon JSON (default: builtin)");
  s_score->add_flag("--lenient", score.lenient, "Skip malformed corpus lines");
  add_backend_flags(s_score, score.backend);
  s_score->callback([&] { action = [&] { return cmd_score(score, env, out, err); }; });

  AggregateOptions aggregate;
  auto* s_agg = app.add_subcommand("aggregate", "Aggregate turn scores into dialog scores");
  s_agg->add_option("--scores", aggregate.scores, "turn_scores.jsonl from `score`")->required();
  s_agg->add_option("--scheme", aggregate.scheme, "uniform | linear | exp:<g> | last:<k>");
  s_agg->add_option("--out", aggregate.out, "Output directory")->required();
  s_agg->callback([&] { action = [&] { return cmd_aggregate(aggregate, out, err); }; });

  CorrelateOptions correlate;
  auto* s_corr = app.add_subcommand("correlate", "Correlate scores with human judgments");
  s_corr->add_option("--corpus", correlate.corpus, "Canonical corpus with human labels")->required();
  s_corr->add_option("--scores", correlate.scores, "turn_scores.jsonl");
  s_corr->add_option("--dialog-scores", correlate.dialog_scores, "dialog_scores.jsonl");
  s_corr->add_option("--target", correlate.targets, "3p_turn, 3p_dialog, 1p_dialog");
  s_corr->add_option("--pooling", correlate.pooling, "pooled or per_dialog_mean")
      ->check(CLI::IsMember({"pooled", "per_dialog_mean"}));
  s_corr->add_option("--bootstrap", correlate.bootstrap, "Bootstrap resamples (0 = off)");
  s_corr->add_option("--seed", correlate.seed, "Bootstrap seed");
  s_corr->add_option("--out", correlate.out, "Output directory")->required();
  s_corr->add_flag("--lenient", correlate.lenient, "Skip malformed corpus lines");
  s_corr->callback([&] { action = [&] { return cmd_correlate(correlate, out, err); }; });

  SweepOptionsCli sw;
  auto* s_sweep = app.add_subcommand("sweep", "Evaluate a grid of scorers and weight schemes");
  s_sweep->add_option("--corpus", sw.corpus, "Canonical corpus with human labels")->required();
  s_sweep->add_option("--strategy", sw.strategies, "Scorer specs (repeatable)");
  s_sweep->add_option("--scheme", sw.schemes, "Weight schemes (repeatable)");
  s_sweep->add_option("--target", sw.targets, "Targets (repeatable)");
  s_sweep->add_option("--pooling", sw.pooling, "pooled or per_dialog_mean")
      ->check(CLI::IsMember({"pooled", "per_dialog_mean"}));
  s_sweep->add_option("--bootstrap", sw.bootstrap, "Bootstrap resamples (0 = off)");
  s_sweep->add_option("--seed", sw.seed, "Seed for generation and bootstrap");
  s_sweep->add_option("--max-tokens", sw.max_tokens, "Generation length cap")
      ->check(CLI::PositiveNumber);
  s_sweep->add_option("--context-window", sw.context_window, "Trailing turns of context (0 = all)");
  s_sweep->add_option("--lexicon", sw.lexicon_path, "Lexicon JSON (default: builtin)");
  s_sweep->add_option("--out", sw.out, "Output directory")->required();
  s_sweep->add_flag("--lenient", sw.lenient, "Skip malformed corpus lines");
  add_backend_flags(s_sweep, sw.backend);
  s_sweep->callback([&] { action = [&] { return cmd_sweep(sw, env, out, err); }; });

  ExportOptions ex;
  auto* s_ex = app.add_subcommand("export-train", "Export turn-quality training examples");
  s_ex->add_option("--corpus", ex.corpus, "Canonical corpus")->required();
  s_ex->add_option("--label-scheme", ex.label_scheme, "annotation, next_sentiment or user_stop")
      ->check(CLI::IsMember({"annotation", "next_sentiment", "user_stop"}));
  s_ex->add_option("--context-window", ex.context_window, "Trailing turns of context (0 = all)");
  s_ex->add_option("--out", ex.out, "Output directory")->required();
  s_ex->add_flag("--lenient", ex.lenient, "Skip malformed corpus lines");
  add_sentiment_flags(s_ex, ex.sentiment, ex.backend_url);
  s_ex->callback([&] { action = [&] { return cmd_export_train(ex, env, out, err); }; });

  FeatureOptions fr;
  auto* s_fr = app.add_subcommand("feature-report", "Correlate human-signal features with ratings");
  s_fr->add_option("--corpus", fr.corpus, "Canonical corpus")->required();
  s_fr->add_option("--bootstrap", fr.bootstrap, "Bootstrap resamples (0 = off)");
  s_fr->add_option("--seed", fr.seed, "Bootstrap seed");
  s_fr->add_option("--out", fr.out, "Output directory")->required();
  s_fr->add_flag("--lenient", fr.lenient, "Skip malformed corpus lines");
  add_sentiment_flags(s_fr, fr.sentiment, fr.backend_url);
  s_fr->callback([&] { action = [&] { return cmd_feature_report(fr, env, out, err); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigOrData;
  }

  try {
    return action ? action() : kConfigOrData;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigOrData;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigOrData;
  } catch (const TransportError& e) {
    err << "error: " << e.what() << '\n';
    return kTransport;
  } catch (const ProtocolError& e) {
    err << "error: " << e.what() << '\n';
    return kTransport;
  } catch (const InsufficientDataError& e) {
    err << "error: " << e.what() << '\n';
    return kInsufficientData;
  } catch (const UndefinedCorrelationError& e) {
    err << "error: " << e.what() << '\n';
    return kInsufficientData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigOrData;
  }
}

}  // namespace dialeval::cli
