// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialeval/backend.hpp"
#include "dialeval/dialog.hpp"
#include "dialeval/score_cache.hpp"
#include "dialeval/sentiment.hpp"

namespace dialeval {

/// How a system turn's quality is estimated.
///  - kNuq: the backend classifies turn quality from the context directly.
///  - kNug: the backend generates the next user utterance; its sentiment is
///    mapped to quality.
///  - kNuf: as kNug, but the backend generates a feedback-style utterance.
///  - kLexiconNextUser: lexicon sentiment of the real next user turn.
///  - kOracleNextUserSentiment: backend sentiment of the real next user turn.
enum class Strategy { kNuq, kNug, kNuf, kLexiconNextUser, kOracleNextUserSentiment };

std::string_view to_string(Strategy s);
/// Accepts "nuq", "nug", "nuf", "lexicon" / "lexicon_next_user",
/// "oracle" / "oracle_next_user_sentiment".
Strategy parse_strategy(std::string_view s);
bool needs_backend(Strategy s);

struct GenerationConfig {
  int max_tokens = 32;
  std::optional<std::int64_t> seed;
  /// Generations averaged per turn; sample i uses seed + i.
  int samples = 1;

  bool operator==(const GenerationConfig&) const = default;
};

struct ScorerConfig {
  Strategy strategy = Strategy::kLexiconNextUser;
  std::optional<std::string> backend_endpoint;
  std::optional<std::size_t> context_window;
  std::optional<GenerationConfig> generation;
  /// Which training labels the NUQ model behind the endpoint used
  /// ("annotation", "next_sentiment", "user_stop"). Descriptive; reported in
  /// sweeps.
  std::optional<std::string> label_scheme;

  /// Throws ConfigError on violated invariants.
  void validate() const;
  /// e.g. "nuq[user_stop]", "lexicon_next_user".
  std::string descriptor() const;
  nlohmann::json to_json() const;

  bool operator==(const ScorerConfig&) const = default;
};

/// "strategy[:label_scheme][@endpoint]", e.g. "nuq:user_stop@http://h:8000".
ScorerConfig parse_scorer_spec(std::string_view spec);

/// Stable 16-hex-digit hash of everything that can change a score. The
/// endpoint is excluded; a lexicon (when used) is included by digest.
std::string config_hash(const ScorerConfig& cfg, const Lexicon* lexicon);

struct TurnScore {
  std::string dialog_id;
  std::size_t target_index = 0;
  double quality = 0.0;
  std::string scorer_id;
  std::string config_hash;
  std::optional<std::string> generated_text;

  bool operator==(const TurnScore&) const = default;
};

/// A system turn that could not be scored (e.g. no next user turn).
struct MissingScore {
  std::string dialog_id;
  std::size_t target_index = 0;
  std::string scorer_id;
  std::string config_hash;
  std::string reason;

  bool operator==(const MissingScore&) const = default;
};

inline constexpr std::string_view kNoNextUserTurn = "no_next_user_turn";

struct ScoreRun {
  std::vector<TurnScore> scores;
  std::vector<MissingScore> missing;
  /// Dialog ids in corpus order, including dialogs with no system turns.
  std::vector<std::string> dialog_order;
};

/// What a scorer may call out to. `backend` is required for NUQ/NUG/NUF and
/// ORACLE; `lexicon` for LEXICON (defaults to the builtin one).
struct ScorerResources {
  InferenceBackend* backend = nullptr;
  const Lexicon* lexicon = nullptr;
};

/// Scores one system turn. Returns nullopt when the score is missing.
/// Throws ProtocolError for out-of-range backend output and TransportError
/// when the backend is unreachable.
std::optional<TurnScore> score_turn(const DialogContext& ctx, const ScorerConfig& cfg,
                                    const Dialog& dialog, const ScorerResources& res);

struct ScoreOptions {
  /// Dialogs scored concurrently.
  std::size_t jobs = 1;
  /// Concurrent backend requests across all workers.
  std::size_t max_in_flight = 4;
};

/// Scores every system turn of every dialog. Output order is dialog order,
/// then turn order, regardless of `jobs`. The cache (if any) is consulted
/// before any backend call and filled after each computed score.
ScoreRun score_corpus(std::span<const Dialog> dialogs, const ScorerConfig& cfg,
                      const ScorerResources& res, ScoreCache* cache,
                      const ScoreOptions& opts = {});

nlohmann::json to_json(const TurnScore& s);
nlohmann::json to_json(const MissingScore& m);
TurnScore turn_score_from_json(const nlohmann::json& j);

/// One JSONL line per system turn, in run order; missing marks carry
/// "quality": null and a "missing" reason.
void write_score_run(std::ostream& out, const ScoreRun& run);
/// Inverse of write_score_run. Throws DataError with the line number.
ScoreRun read_score_run(std::istream& in);

}  // namespace dialeval
