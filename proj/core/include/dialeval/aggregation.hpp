// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialeval/scoring.hpp"

namespace dialeval {

/// Rule turning n scored system turns into n normalized weights. Weights
/// index scored turns (missing ones already dropped), earliest first.
struct WeightScheme {
  enum class Kind { kUniform, kLinearPosition, kExponential, kLastK };

  Kind kind = Kind::kUniform;
  /// Exponential decay, in (0,1]. Turn i of n gets gamma^(n-1-i).
  double gamma = kDefaultGamma;
  /// LAST_K window, >= 1.
  std::size_t k = 1;

  static constexpr double kDefaultGamma = 0.9;

  static WeightScheme uniform() { return {}; }
  static WeightScheme linear() { return {Kind::kLinearPosition}; }
  static WeightScheme exponential(double gamma = kDefaultGamma);
  static WeightScheme last_k(std::size_t k);

  /// "uniform", "linear", "exp:<gamma>", "last:<k>". Round-trips through
  /// parse_weight_scheme.
  std::string to_string() const;

  bool operator==(const WeightScheme&) const = default;
};

/// Inverse of WeightScheme::to_string; "exp" alone means exp:0.9.
/// Throws ConfigError on anything else.
WeightScheme parse_weight_scheme(std::string_view s);

/// n non-negative weights summing to 1. Throws DataError for n == 0.
std::vector<double> weights(const WeightScheme& scheme, std::size_t n);

struct DialogScore {
  std::string dialog_id;
  double quality = 0.0;
  WeightScheme scheme;
  std::size_t n_turns_used = 0;
  std::size_t n_missing = 0;
  std::string scorer_id;
  std::string config_hash;

  bool operator==(const DialogScore&) const = default;
};

/// Weighted mean of the non-missing entries of `turn_qualities` (turn
/// order). Throws InsufficientDataError naming the dialog when every entry is
/// missing.
DialogScore aggregate(std::string_view dialog_id,
                      std::span<const std::optional<double>> turn_qualities,
                      const WeightScheme& scheme);

struct AggregateRun {
  std::vector<DialogScore> scores;
  /// Dialogs whose system turns were all missing.
  std::vector<std::string> unscorable;
};

/// Groups a score run by (scorer, config, dialog) in run order and aggregates
/// each group.
AggregateRun aggregate_run(const ScoreRun& run, const WeightScheme& scheme);

/// lo + (hi - lo) * q. Throws DataError if q is outside [0,1] or lo >= hi.
double rescale_to_rating(double q, double lo = 1.0, double hi = 5.0);

nlohmann::json to_json(const DialogScore& s);
DialogScore dialog_score_from_json(const nlohmann::json& j);

}  // namespace dialeval
