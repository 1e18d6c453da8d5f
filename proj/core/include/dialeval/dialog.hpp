// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace dialeval {

enum class Speaker { kUser, kSystem };

std::string_view to_string(Speaker s);
/// Accepts "user" / "system"; throws DataError otherwise.
Speaker parse_speaker(std::string_view s);

struct Turn {
  std::size_t index = 0;
  Speaker speaker = Speaker::kUser;
  std::string text;
  /// Human turn label normalized into [0,1].
  std::optional<double> quality_label;
  /// Cached sentiment scalar in [-1,1].
  std::optional<double> sentiment;
  /// Unknown JSON fields, kept verbatim for round-trips.
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const Turn&) const = default;
};

struct Dialog {
  std::string id;
  std::string source;
  std::vector<Turn> turns;
  std::optional<double> first_party_rating;
  std::vector<double> third_party_ratings;
  std::optional<std::string> feedback;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const Dialog&) const = default;
};

/// The history a scorer sees when judging the system turn at target_index.
struct DialogContext {
  std::string dialog_id;
  std::size_t target_index = 0;
  std::vector<Turn> turns;
};

inline constexpr double kMinRating = 1.0;
inline constexpr double kMaxRating = 5.0;

/// Every invariant violation in `d`, in a stable order. Empty means valid.
std::vector<std::string> validate_dialog(const Dialog& d);

/// The violation message reported for a dialog without turns.
inline constexpr std::string_view kNoTurnsViolation = "dialog has no turns";

/// One context per SYSTEM turn in index order. With `window`, each context
/// keeps only the last min(window, target_index + 1) turns.
/// Throws DataError if `d` is invalid (a turn-less dialog yields an empty
/// list rather than an error).
std::vector<DialogContext> system_turn_contexts(
    const Dialog& d, std::optional<std::size_t> window = std::nullopt);

/// Context for a single system turn; same windowing rule as above.
DialogContext context_for(const Dialog& d, std::size_t system_index,
                          std::optional<std::size_t> window = std::nullopt);

/// First USER turn after `system_index`, if any. Throws DataError if
/// `system_index` is out of range or not a SYSTEM turn.
std::optional<Turn> next_user_turn(const Dialog& d, std::size_t system_index);

/// Mean of the 3P ratings, if any.
std::optional<double> third_party_mean(const Dialog& d);

// Canonical JSON (one dialog per JSONL line).
nlohmann::json to_json(const Turn& t);
nlohmann::json to_json(const Dialog& d);
/// Parses the canonical schema. Throws DataError naming the offending field.
/// Does not run validate_dialog.
Dialog dialog_from_json(const nlohmann::json& j);

/// Wire/cache form of a context: [{"speaker": ..., "text": ...}, ...].
nlohmann::json context_to_json(const DialogContext& ctx);
nlohmann::json context_to_json(const std::vector<Turn>& turns);

}  // namespace dialeval
