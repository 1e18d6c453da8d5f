// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialeval/dialog.hpp"
#include "dialeval/sentiment.hpp"

namespace dialeval {

// ---------------------------------------------------------------------------
// Canonical JSONL

struct LoadOptions {
  /// Skip bad lines (and report them) instead of failing on the first one.
  bool lenient = false;
};

struct LineError {
  std::size_t line = 0;
  std::string message;
};

struct LoadResult {
  std::vector<Dialog> dialogs;
  /// Only populated in lenient mode.
  std::vector<LineError> errors;
};

/// Reads one dialog per line. Blank lines are ignored. Every dialog must
/// parse, pass validate_dialog and have an id not seen earlier in the file.
/// Strict mode throws DataError citing the line number.
LoadResult load_canonical(std::istream& in, const LoadOptions& opts = {});
LoadResult load_canonical_file(const std::filesystem::path& path,
                               const LoadOptions& opts = {});

void write_canonical(std::ostream& out, std::span<const Dialog> dialogs);

// ---------------------------------------------------------------------------
// External corpora

enum class LabelScale { kBinary01, kLike012, kRating15 };
std::string_view to_string(LabelScale s);
LabelScale parse_label_scale(std::string_view s);

/// Maps the mean of raw annotator values onto [0,1]: BINARY_01 identity,
/// LIKE_012 divided by 2, RATING_15 as (v-1)/4.
double normalize_turn_label(double raw_mean, LabelScale scale);
/// True if a single raw annotator value is legal on `scale`.
bool in_scale(double raw, LabelScale scale);

/// Declarative description of an external file layout. Paths are JSON
/// Pointers (RFC 6901), dialog-level ones relative to each record and
/// turn-level ones relative to each turn object.
struct FieldMapping {
  struct TurnList {
    std::string path;     ///< array of turn objects
    std::string speaker;  ///< speaker tag within a turn
    std::string text;
    std::optional<std::string> label;  ///< number or array of annotator numbers
  };
  struct TurnText {
    std::string path;  ///< string holding "Speaker: text" lines
    std::string separator = "\n";
  };
  struct AnnotationRecords {
    std::string dialog_id;
    std::string turn_index;
    std::string label;  ///< number or array of numbers
  };

  std::string source;
  /// Pointer to the array of dialog records; "" is the document root.
  std::string records;
  /// Records where any of these pointers resolve are skipped.
  std::vector<std::string> require_absent;
  /// Dialog id pointer; when absent ids are "<source>-<ordinal>".
  std::optional<std::string> id;
  std::optional<TurnList> turns;
  std::optional<TurnText> turns_text;
  std::vector<std::string> user_tags;
  std::vector<std::string> system_tags;
  std::optional<std::string> first_party_rating;
  /// Number or array of per-annotator ratings.
  std::optional<std::string> third_party_ratings;
  std::optional<std::string> feedback;
  /// Layout of a separate turn-annotation file, if the corpus has one.
  std::optional<AnnotationRecords> annotations;

  /// Throws ConfigError on double-mapped targets, missing turn layout or a
  /// speaker mapping that does not cover both speakers.
  void validate() const;

  static FieldMapping from_json(const nlohmann::json& j);
  static FieldMapping from_file(const std::filesystem::path& path);
  /// "fed" or "dstc9".
  static FieldMapping builtin(std::string_view name);
};

/// Parses a JSON document; if the text is not a single JSON value it is
/// read as JSON Lines and returned as an array.
nlohmann::json parse_document(std::string_view text);

/// Converts an external document to dialogs. Multiple annotator values for
/// one turn are averaged before normalization; dialog ratings stay on
/// [1,5]. Throws DataError naming the unresolvable path, or the dialog id
/// and turn index of an out-of-range value.
std::vector<Dialog> adapt_external(const nlohmann::json& document, const FieldMapping& mapping,
                                   LabelScale scale);

/// Merges a separate turn-annotation document (records laid out per
/// mapping.annotations) into `dialogs`. All values for one (dialog, turn)
/// are averaged, normalized and replace that turn's quality_label.
void merge_turn_annotations(std::vector<Dialog>& dialogs, const nlohmann::json& records,
                            const FieldMapping& mapping, LabelScale scale);

// ---------------------------------------------------------------------------
// Training data for next-user-quality classifiers

enum class LabelScheme { kAnnotation, kNextSentiment, kUserStop };
std::string_view to_string(LabelScheme s);
LabelScheme parse_label_scheme(std::string_view s);

struct TrainingExample {
  /// "user: ..." / "system: ..." lines, oldest first, ending with the target.
  std::vector<std::string> context;
  double label = 0.0;
  LabelScheme scheme = LabelScheme::kAnnotation;
  std::string dialog_id;
  std::size_t target_index = 0;

  bool operator==(const TrainingExample&) const = default;
};

struct ExportResult {
  std::vector<TrainingExample> examples;
  /// System turns skipped (unlabeled for ANNOTATION, unanswered for
  /// NEXT_SENTIMENT).
  std::size_t skipped = 0;
};

/// ANNOTATION: label = quality_label. NEXT_SENTIMENT: label =
/// sentiment_to_quality of the next user turn (continuous). USER_STOP:
/// 1 iff no user turn follows. Throws ConfigError when NEXT_SENTIMENT has
/// no scorer.
ExportResult export_training_examples(std::span<const Dialog> dialogs, LabelScheme scheme,
                                      SentimentScorer* sentiment,
                                      std::optional<std::size_t> window = std::nullopt);

nlohmann::json to_json(const TrainingExample& e);

}  // namespace dialeval
