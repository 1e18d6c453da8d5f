// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialeval/aggregation.hpp"
#include "dialeval/dialog.hpp"
#include "dialeval/scoring.hpp"
#include "dialeval/sentiment.hpp"
#include "dialeval/stats.hpp"

namespace dialeval {

enum class Pooling { kPooled, kPerDialogMean };
std::string_view to_string(Pooling p);
Pooling parse_pooling(std::string_view s);

enum class DialogTarget { kFirstParty, kThirdPartyMean };

/// Report targets: "3p_turn", "3p_dialog", "1p_dialog".
enum class Target { kThirdPartyTurn, kThirdPartyDialog, kFirstPartyDialog };
std::string_view to_string(Target t);
Target parse_target(std::string_view s);

enum class RowStatus { kOk, kUndefined, kInsufficient };
std::string_view to_string(RowStatus s);

struct ReportRow {
  std::string config;
  std::string scorer;
  std::string scheme;
  std::string label_scheme;
  std::string target;
  std::string pooling;
  std::optional<double> r_pearson;
  std::optional<double> r_spearman;
  std::size_t n = 0;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  RowStatus status = RowStatus::kOk;
  /// Why the row is not ok, when it isn't.
  std::string note;
};

/// Best row per target, chosen by maximum Pearson r.
struct BestRow {
  std::string target;
  std::string config;
  double r_pearson = 0.0;
  /// Other rows with exactly the same r; the earliest in grid order won.
  std::vector<std::string> tied_with;
};

struct CorrelationReport {
  std::vector<ReportRow> rows;
  std::vector<BestRow> best;
};

struct EvalOptions {
  /// 0 disables bootstrap intervals.
  std::size_t bootstrap_resamples = 0;
  std::uint64_t seed = 0;
  double level = 0.95;
};

struct Evaluation {
  PairedSamples samples;
  ReportRow row;
  /// Candidates dropped for lacking a human target.
  std::size_t excluded_unlabeled = 0;
  /// Candidates dropped for lacking a prediction.
  std::size_t excluded_missing = 0;
};

/// Correlates turn scores with 3P turn labels. Throws InsufficientDataError
/// with fewer than 2 pairs; a zero-variance side yields status kUndefined.
Evaluation evaluate_turn_level(std::span<const TurnScore> turn_scores,
                               std::span<const Dialog> dialogs, Pooling pooling,
                               const EvalOptions& opts = {});

/// Correlates dialog scores with 1P ratings or mean 3P ratings.
Evaluation evaluate_dialog_level(std::span<const DialogScore> dialog_scores,
                                 std::span<const Dialog> dialogs, DialogTarget target,
                                 const EvalOptions& opts = {});

struct SweepResources {
  /// Backend to use for a scorer config (may return nullptr for lexicon).
  std::function<InferenceBackend*(const ScorerConfig&)> backend_for;
  const Lexicon* lexicon = nullptr;
  ScoreCache* cache = nullptr;
};

struct SweepOptions {
  Pooling pooling = Pooling::kPooled;
  EvalOptions eval;
  ScoreOptions scoring;
};

/// Scores every config once, aggregates under every scheme and evaluates
/// every target. Rows come back sorted by (config descriptor, target);
/// undefined/insufficient rows are kept but never chosen as best. Ties in r
/// go to the earliest scheme (then scorer) in grid order.
CorrelationReport sweep(std::span<const Dialog> dialogs,
                        std::span<const ScorerConfig> scorers,
                        std::span<const WeightScheme> schemes,
                        std::span<const Target> targets, const SweepResources& res,
                        const SweepOptions& opts = {});

/// Human-signal analysis: mean 3P turn label, mean user-turn sentiment and
/// the user-stop length signal (system turns that a user answered), each
/// correlated with the 1P and 3P dialog ratings.
CorrelationReport feature_report(std::span<const Dialog> dialogs, SentimentScorer& sentiment,
                                 const EvalOptions& opts = {});

/// Picks best rows per target; exposed for testing the argmax rule.
std::vector<BestRow> select_best(std::span<const ReportRow> rows_in_grid_order);

/// Numbers use 6 significant digits.
std::string format_number(double v);
void write_report_csv(std::ostream& out, const CorrelationReport& report);
nlohmann::json report_to_json(const CorrelationReport& report);

}  // namespace dialeval
