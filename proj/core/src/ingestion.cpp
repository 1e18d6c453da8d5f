// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "dialeval/ingestion.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "dialeval/error.hpp"

namespace dialeval {

using nlohmann::json;

LoadResult load_canonical(std::istream& in, const LoadOptions& opts) {
  LoadResult result;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string problem;
    try {
      Dialog d = dialog_from_json(json::parse(line));
      if (auto v = validate_dialog(d); !v.empty()) {
        problem = "dialog '" + d.id + "': " + v.front();
      } else if (!ids.insert(d.id).second) {
        problem = "duplicate dialog id '" + d.id + "'";
      } else {
        result.dialogs.push_back(std::move(d));
        continue;
      }
    } catch (const json::parse_error& e) {
      problem = std::string("malformed JSON: ") + e.what();
    } catch (const DataError& e) {
      problem = std::string("schema violation: ") + e.what();
    }
    if (!opts.lenient) {
      throw DataError("line " + std::to_string(line_no) + ": " + problem);
    }
    result.errors.push_back({line_no, std::move(problem)});
  }
  return result;
}

LoadResult load_canonical_file(const std::filesystem::path& path, const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read corpus " + path.string());
  try {
    return load_canonical(in, opts);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_canonical(std::ostream& out, std::span<const Dialog> dialogs) {
  for (const Dialog& d : dialogs) out << to_json(d).dump() << '\n';
}

std::string_view to_string(LabelScale s) {
  switch (s) {
    case LabelScale::kBinary01: return "binary01";
    case LabelScale::kLike012: return "like012";
    case LabelScale::kRating15: return "rating15";
  }
  return "unknown";
}

LabelScale parse_label_scale(std::string_view s) {
  if (s == "binary01" || s == "binary") return LabelScale::kBinary01;
  if (s == "like012" || s == "like") return LabelScale::kLike012;
  if (s == "rating15" || s == "rating") return LabelScale::kRating15;
  throw ConfigError("unknown label scale '" + std::string(s) + "'");
}

bool in_scale(double raw, LabelScale scale) {
  switch (scale) {
    case LabelScale::kBinary01: return raw >= 0.0 && raw <= 1.0;
    case LabelScale::kLike012: return raw >= 0.0 && raw <= 2.0;
    case LabelScale::kRating15: return raw >= 1.0 && raw <= 5.0;
  }
  return false;
}

double normalize_turn_label(double raw_mean, LabelScale scale) {
  switch (scale) {
    case LabelScale::kBinary01: return raw_mean;
    case LabelScale::kLike012: return raw_mean / 2.0;
    case LabelScale::kRating15: return (raw_mean - 1.0) / 4.0;
  }
  return raw_mean;
}

std::string_view to_string(LabelScheme s) {
  switch (s) {
    case LabelScheme::kAnnotation: return "annotation";
    case LabelScheme::kNextSentiment: return "next_sentiment";
    case LabelScheme::kUserStop: return "user_stop";
  }
  return "unknown";
}

LabelScheme parse_label_scheme(std::string_view s) {
  if (s == "annotation") return LabelScheme::kAnnotation;
  if (s == "next_sentiment") return LabelScheme::kNextSentiment;
  if (s == "user_stop") return LabelScheme::kUserStop;
  throw ConfigError("unknown label scheme '" + std::string(s) + "'");
}

namespace {

std::vector<std::string> prefixed(const DialogContext& ctx) {
  std::vector<std::string> out;
  out.reserve(ctx.turns.size());
  for (const Turn& t : ctx.turns) out.push_back(std::string(to_string(t.speaker)) + ": " + t.text);
  return out;
}

}  // namespace

ExportResult export_training_examples(std::span<const Dialog> dialogs, LabelScheme scheme,
                                      SentimentScorer* sentiment,
                                      std::optional<std::size_t> window) {
  if (scheme == LabelScheme::kNextSentiment && !sentiment) {
    throw ConfigError("next_sentiment labels need a sentiment scorer");
  }
  ExportResult result;
  for (const Dialog& d : dialogs) {
    for (const DialogContext& ctx : system_turn_contexts(d, window)) {
      const Turn& target = d.turns[ctx.target_index];
      TrainingExample ex;
      ex.scheme = scheme;
      ex.dialog_id = d.id;
      ex.target_index = ctx.target_index;
      switch (scheme) {
        case LabelScheme::kAnnotation:
          if (!target.quality_label) {
            ++result.skipped;
            continue;
          }
          ex.label = *target.quality_label;
          break;
        case LabelScheme::kNextSentiment: {
          auto next = next_user_turn(d, ctx.target_index);
          if (!next) {
            ++result.skipped;
            continue;
          }
          ex.label = sentiment_to_quality(sentiment->score_one(next->text));
          break;
        }
        case LabelScheme::kUserStop:
          ex.label = next_user_turn(d, ctx.target_index) ? 0.0 : 1.0;
          break;
      }
      ex.context = prefixed(ctx);
      result.examples.push_back(std::move(ex));
    }
  }
  return result;
}

json to_json(const TrainingExample& e) {
  return {{"context", e.context},
          {"label", e.label},
          {"scheme", to_string(e.scheme)},
          {"dialog_id", e.dialog_id},
          {"target_index", e.target_index}};
}

}  // namespace dialeval
