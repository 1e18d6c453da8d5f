// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "dialeval/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <unordered_map>

#include "dialeval/error.hpp"

namespace dialeval {

using nlohmann::json;

std::string_view to_string(Pooling p) {
  return p == Pooling::kPooled ? "pooled" : "per_dialog_mean";
}

Pooling parse_pooling(std::string_view s) {
  if (s == "pooled") return Pooling::kPooled;
  if (s == "per_dialog_mean") return Pooling::kPerDialogMean;
  throw ConfigError("unknown pooling '" + std::string(s) + "'");
}

std::string_view to_string(Target t) {
  switch (t) {
    case Target::kThirdPartyTurn: return "3p_turn";
    case Target::kThirdPartyDialog: return "3p_dialog";
    case Target::kFirstPartyDialog: return "1p_dialog";
  }
  return "unknown";
}

Target parse_target(std::string_view s) {
  if (s == "3p_turn") return Target::kThirdPartyTurn;
  if (s == "3p_dialog") return Target::kThirdPartyDialog;
  if (s == "1p_dialog") return Target::kFirstPartyDialog;
  throw ConfigError("unknown target '" + std::string(s) + "'");
}

std::string_view to_string(RowStatus s) {
  switch (s) {
    case RowStatus::kOk: return "ok";
    case RowStatus::kUndefined: return "undefined";
    case RowStatus::kInsufficient: return "insufficient";
  }
  return "unknown";
}

namespace {

constexpr std::string_view kNotApplicable = "-";

/// Fills the statistics of `row` from `samples`.
void correlate_into(const PairedSamples& samples, ReportRow& row, const EvalOptions& opts) {
  row.n = samples.size();
  try {
    row.r_pearson = pearson(samples.predictions, samples.targets);
    row.r_spearman = spearman(samples.predictions, samples.targets);
  } catch (const UndefinedCorrelationError& e) {
    row.status = RowStatus::kUndefined;
    row.note = e.what();
    row.r_pearson.reset();
    row.r_spearman.reset();
    return;
  }
  row.status = RowStatus::kOk;
  if (opts.bootstrap_resamples > 0) {
    try {
      const auto ci = bootstrap_ci(samples, opts.bootstrap_resamples, opts.seed, opts.level);
      row.ci_low = ci.low;
      row.ci_high = ci.high;
    } catch (const InsufficientDataError& e) {
      row.note = e.what();
    }
  }
}

void copy_stats(const ReportRow& from, ReportRow& to) {
  to.r_pearson = from.r_pearson;
  to.r_spearman = from.r_spearman;
  to.n = from.n;
  to.ci_low = from.ci_low;
  to.ci_high = from.ci_high;
  to.status = from.status;
  to.note = from.note;
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::optional<double> dialog_target(const Dialog& d, DialogTarget target) {
  return target == DialogTarget::kFirstParty ? d.first_party_rating : third_party_mean(d);
}

std::string_view target_name(DialogTarget t) {
  return to_string(t == DialogTarget::kFirstParty ? Target::kFirstPartyDialog
                                                  : Target::kThirdPartyDialog);
}

}  // namespace

Evaluation evaluate_turn_level(std::span<const TurnScore> turn_scores,
                               std::span<const Dialog> dialogs, Pooling pooling,
                               const EvalOptions& opts) {
  std::map<std::pair<std::string, std::size_t>, double> predicted;
  for (const auto& s : turn_scores) predicted[{s.dialog_id, s.target_index}] = s.quality;

  Evaluation ev;
  for (const Dialog& d : dialogs) {
    std::vector<double> preds, labels;
    for (const Turn& t : d.turns) {
      if (t.speaker != Speaker::kSystem) continue;
      auto it = predicted.find({d.id, t.index});
      if (!t.quality_label) {
        ++ev.excluded_unlabeled;
        continue;
      }
      if (it == predicted.end()) {
        ++ev.excluded_missing;
        continue;
      }
      if (pooling == Pooling::kPooled) {
        ev.samples.predictions.push_back(it->second);
        ev.samples.targets.push_back(*t.quality_label);
        ev.samples.labels.push_back({d.id, t.index});
      } else {
        preds.push_back(it->second);
        labels.push_back(*t.quality_label);
      }
    }
    if (pooling == Pooling::kPerDialogMean && !preds.empty()) {
      ev.samples.predictions.push_back(mean(preds));
      ev.samples.targets.push_back(mean(labels));
      ev.samples.labels.push_back({d.id, std::nullopt});
    }
  }
  if (ev.samples.size() < 2) {
    throw InsufficientDataError(
        "insufficient data: " + std::to_string(ev.samples.size()) +
        " turn-level pair(s) (" + std::to_string(ev.excluded_unlabeled) + " unlabeled, " +
        std::to_string(ev.excluded_missing) + " unscored system turns)");
  }
  ev.row.target = to_string(Target::kThirdPartyTurn);
  ev.row.pooling = to_string(pooling);
  ev.row.scheme = kNotApplicable;
  if (!turn_scores.empty()) ev.row.scorer = turn_scores.front().scorer_id;
  ev.row.config = ev.row.scorer + "|" + ev.row.scheme;
  correlate_into(ev.samples, ev.row, opts);
  return ev;
}

Evaluation evaluate_dialog_level(std::span<const DialogScore> dialog_scores,
                                 std::span<const Dialog> dialogs, DialogTarget target,
                                 const EvalOptions& opts) {
  std::unordered_map<std::string, const DialogScore*> by_id;
  for (const auto& s : dialog_scores) by_id.emplace(s.dialog_id, &s);

  Evaluation ev;
  for (const Dialog& d : dialogs) {
    auto it = by_id.find(d.id);
    const auto human = dialog_target(d, target);
    if (!human) {
      ++ev.excluded_unlabeled;
      continue;
    }
    if (it == by_id.end()) {
      ++ev.excluded_missing;
      continue;
    }
    ev.samples.predictions.push_back(it->second->quality);
    ev.samples.targets.push_back(*human);
    ev.samples.labels.push_back({d.id, std::nullopt});
  }
  if (ev.samples.size() < 2) {
    throw InsufficientDataError(
        "insufficient data: " + std::to_string(ev.samples.size()) + " dialog(s) with both a " +
        "score and a " + std::string(target_name(target)) + " rating (" +
        std::to_string(ev.excluded_unlabeled) + " unrated, " +
        std::to_string(ev.excluded_missing) + " unscored)");
  }
  ev.row.target = target_name(target);
  ev.row.pooling = kNotApplicable;
  if (!dialog_scores.empty()) {
    ev.row.scorer = dialog_scores.front().scorer_id;
    ev.row.scheme = dialog_scores.front().scheme.to_string();
  }
  ev.row.config = ev.row.scorer + "|" + ev.row.scheme;
  correlate_into(ev.samples, ev.row, opts);
  return ev;
}

std::vector<BestRow> select_best(std::span<const ReportRow> rows) {
  std::vector<std::string> targets;
  for (const auto& r : rows) {
    if (std::find(targets.begin(), targets.end(), r.target) == targets.end()) {
      targets.push_back(r.target);
    }
  }
  std::vector<BestRow> out;
  for (const auto& target : targets) {
    const ReportRow* best = nullptr;
    for (const auto& r : rows) {
      if (r.target != target || r.status != RowStatus::kOk || !r.r_pearson) continue;
      if (!best || *r.r_pearson > *best->r_pearson) best = &r;
    }
    if (!best) continue;
    BestRow b{target, best->config, *best->r_pearson, {}};
    for (const auto& r : rows) {
      if (&r != best && r.target == target && r.status == RowStatus::kOk && r.r_pearson &&
          *r.r_pearson == b.r_pearson) {
        b.tied_with.push_back(r.config);
      }
    }
    out.push_back(std::move(b));
  }
  return out;
}

CorrelationReport sweep(std::span<const Dialog> dialogs,
                        std::span<const ScorerConfig> scorers,
                        std::span<const WeightScheme> schemes,
                        std::span<const Target> targets, const SweepResources& res,
                        const SweepOptions& opts) {
  if (scorers.empty() || targets.empty()) {
    throw ConfigError("sweep: configuration grid is empty");
  }
  const bool any_dialog_target =
      std::any_of(targets.begin(), targets.end(),
                  [](Target t) { return t != Target::kThirdPartyTurn; });
  if (any_dialog_target && schemes.empty()) {
    throw ConfigError("sweep: dialog-level targets need at least one weight scheme");
  }

  std::vector<ScoreRun> runs;
  runs.reserve(scorers.size());
  for (const auto& cfg : scorers) {
    ScorerResources sr;
    sr.backend = res.backend_for ? res.backend_for(cfg) : nullptr;
    sr.lexicon = res.lexicon;
    runs.push_back(score_corpus(dialogs, cfg, sr, res.cache, opts.scoring));
  }

  auto base_row = [&](std::size_t s, std::string scheme, Target target) {
    ReportRow row;
    row.scorer = scorers[s].descriptor();
    row.scheme = std::move(scheme);
    row.label_scheme = scorers[s].label_scheme.value_or("");
    row.target = to_string(target);
    row.config = row.scorer + "|" + row.scheme;
    return row;
  };
  auto insufficient = [](ReportRow& row, const InsufficientDataError& e) {
    row.status = RowStatus::kInsufficient;
    row.note = e.what();
  };

  // Grid order: turn-level rows first, then scheme-major, scorer-minor.
  std::vector<ReportRow> rows;
  for (Target target : targets) {
    if (target != Target::kThirdPartyTurn) continue;
    for (std::size_t s = 0; s < scorers.size(); ++s) {
      ReportRow row = base_row(s, std::string(kNotApplicable), target);
      row.pooling = to_string(opts.pooling);
      try {
        copy_stats(evaluate_turn_level(runs[s].scores, dialogs, opts.pooling, opts.eval).row,
                   row);
      } catch (const InsufficientDataError& e) {
        insufficient(row, e);
      }
      rows.push_back(std::move(row));
    }
  }
  for (const auto& scheme : schemes) {
    std::vector<AggregateRun> aggs;
    for (std::size_t s = 0; s < scorers.size(); ++s) aggs.push_back(aggregate_run(runs[s], scheme));
    for (Target target : targets) {
      if (target == Target::kThirdPartyTurn) continue;
      const auto dt = target == Target::kFirstPartyDialog ? DialogTarget::kFirstParty
                                                          : DialogTarget::kThirdPartyMean;
      for (std::size_t s = 0; s < scorers.size(); ++s) {
        ReportRow row = base_row(s, scheme.to_string(), target);
        row.pooling = kNotApplicable;
        try {
          copy_stats(evaluate_dialog_level(aggs[s].scores, dialogs, dt, opts.eval).row, row);
        } catch (const InsufficientDataError& e) {
          insufficient(row, e);
        }
        rows.push_back(std::move(row));
      }
    }
  }

  CorrelationReport report;
  report.best = select_best(rows);
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return std::tie(a.config, a.target) < std::tie(b.config, b.target);
  });
  report.rows = std::move(rows);
  return report;
}

CorrelationReport feature_report(std::span<const Dialog> dialogs, SentimentScorer& sentiment,
                                 const EvalOptions& opts) {
  // Score every user turn lacking a cached sentiment in one batch.
  std::vector<std::string> texts;
  for (const Dialog& d : dialogs) {
    for (const Turn& t : d.turns) {
      if (t.speaker == Speaker::kUser && !t.sentiment) texts.push_back(t.text);
    }
  }
  std::vector<SentimentScore> scored;
  constexpr std::size_t kBatch = 64;
  for (std::size_t i = 0; i < texts.size(); i += kBatch) {
    const std::size_t n = std::min(kBatch, texts.size() - i);
    auto part = sentiment.score(std::span<const std::string>(texts).subspan(i, n));
    if (part.size() != n) throw ProtocolError("sentiment scorer returned a short batch");
    scored.insert(scored.end(), part.begin(), part.end());
  }

  struct Features {
    std::optional<double> mean_turn_label;
    std::optional<double> mean_user_sentiment;
    double answered_system_turns = 0.0;
  };
  std::vector<Features> features;
  std::size_t next_scored = 0;
  for (const Dialog& d : dialogs) {
    Features f;
    std::vector<double> labels, sentiments;
    for (const Turn& t : d.turns) {
      if (t.speaker == Speaker::kSystem) {
        if (t.quality_label) labels.push_back(*t.quality_label);
        if (next_user_turn(d, t.index)) f.answered_system_turns += 1.0;
      } else {
        sentiments.push_back(t.sentiment ? *t.sentiment : scored[next_scored++].value);
      }
    }
    if (!labels.empty()) f.mean_turn_label = mean(labels);
    if (!sentiments.empty()) f.mean_user_sentiment = mean(sentiments);
    features.push_back(f);
  }

  struct FeatureSpec {
    const char* name;
    const char* scorer;
    std::function<std::optional<double>(const Features&)> get;
  };
  const FeatureSpec specs[] = {
      {"mean_turn_label", "human_3p_turn", [](const Features& f) { return f.mean_turn_label; }},
      {"mean_user_sentiment", "user_sentiment",
       [](const Features& f) { return f.mean_user_sentiment; }},
      {"user_stop_length", "user_stop",
       [](const Features& f) { return std::optional<double>(f.answered_system_turns); }},
  };

  std::vector<ReportRow> rows;
  for (const auto& spec : specs) {
    for (DialogTarget target : {DialogTarget::kFirstParty, DialogTarget::kThirdPartyMean}) {
      ReportRow row;
      row.config = std::string("feature:") + spec.name;
      row.scorer = spec.scorer;
      row.scheme = "uniform";
      row.target = target_name(target);
      row.pooling = kNotApplicable;
      PairedSamples samples;
      for (std::size_t i = 0; i < dialogs.size(); ++i) {
        const auto x = spec.get(features[i]);
        const auto y = dialog_target(dialogs[i], target);
        if (!x || !y) continue;
        samples.predictions.push_back(*x);
        samples.targets.push_back(*y);
        samples.labels.push_back({dialogs[i].id, std::nullopt});
      }
      if (samples.size() < 2) {
        row.n = samples.size();
        row.status = RowStatus::kInsufficient;
        row.note = "insufficient data: " + std::to_string(samples.size()) + " dialog(s)";
      } else {
        correlate_into(samples, row, opts);
      }
      rows.push_back(std::move(row));
    }
  }
  CorrelationReport report;
  report.best = select_best(rows);
  report.rows = std::move(rows);
  return report;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

namespace {

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

json json_number(const std::optional<double>& v) {
  if (!v) return nullptr;
  return json::parse(format_number(*v));
}

}  // namespace

void write_report_csv(std::ostream& out, const CorrelationReport& report) {
  out << "config,scorer,scheme,label_scheme,target,pooling,r_pearson,r_spearman,n,ci_low,"
         "ci_high,status\n";
  for (const auto& r : report.rows) {
    out << csv_field(r.config) << ',' << csv_field(r.scorer) << ',' << csv_field(r.scheme)
        << ',' << csv_field(r.label_scheme) << ',' << csv_field(r.target) << ','
        << csv_field(r.pooling) << ',' << csv_number(r.r_pearson) << ','
        << csv_number(r.r_spearman) << ',' << r.n << ',' << csv_number(r.ci_low) << ','
        << csv_number(r.ci_high) << ',' << to_string(r.status) << '\n';
  }
}

json report_to_json(const CorrelationReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    json j = {{"config", r.config},
              {"scorer", r.scorer},
              {"scheme", r.scheme},
              {"label_scheme", r.label_scheme},
              {"target", r.target},
              {"pooling", r.pooling},
              {"r_pearson", json_number(r.r_pearson)},
              {"r_spearman", json_number(r.r_spearman)},
              {"n", r.n},
              {"ci_low", json_number(r.ci_low)},
              {"ci_high", json_number(r.ci_high)},
              {"status", to_string(r.status)}};
    if (!r.note.empty()) j["note"] = r.note;
    rows.push_back(std::move(j));
  }
  json best = json::array();
  for (const auto& b : report.best) {
    best.push_back({{"target", b.target},
                    {"config", b.config},
                    {"r_pearson", json_number(b.r_pearson)},
                    {"tied_with", b.tied_with},
                    {"tie_break", "earliest scheme, then scorer, in grid order"}});
  }
  return {{"rows", std::move(rows)}, {"best", std::move(best)}};
}

}  // namespace dialeval
