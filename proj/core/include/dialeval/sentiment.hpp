// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace dialeval {

class InferenceBackend;

/// Scalar sentiment in [-1,1], optionally with the (negative, neutral,
/// positive) class probabilities it was collapsed from.
struct SentimentScore {
  double value = 0.0;
  std::optional<std::array<double, 3>> class_probabilities;

  /// value = positive - negative. Throws ProtocolError unless each
  /// probability is in [0,1] and they sum to 1 within 1e-6.
  static SentimentScore from_probabilities(double negative, double neutral,
                                           double positive);
};

inline constexpr double kProbabilitySumTolerance = 1e-6;

/// Lowercased word lists for the deterministic baseline scorer.
struct Lexicon {
  std::set<std::string> positive;
  std::set<std::string> negative;
  std::set<std::string> negators;
  /// How many preceding tokens are searched for a negator.
  std::size_t negation_window = 3;

  /// Throws ConfigError if positive/negative are empty or overlap.
  void validate() const;
  /// Stable content hash, used in scorer config hashes.
  std::string digest() const;

  /// {"positive": [...], "negative": [...], "negators": [...]}
  static Lexicon from_json(const nlohmann::json& j);
  static Lexicon from_file(const std::string& path);
  /// The shipped fixture lexicon. Offline baseline only; it is not a
  /// replacement for a trained sentiment classifier.
  static const Lexicon& builtin();
};

/// Lowercase, then split on runs of non-alphanumeric ASCII. Bytes >= 0x80
/// are kept inside tokens so UTF-8 words survive.
std::vector<std::string> tokenize(std::string_view text);

/// Each positive/negative hit counts +1/-1, flipped when a negator sits in
/// the `negation_window` tokens before it. value = (P-N)/(P+N), or 0 with no
/// hits.
SentimentScore lexicon_sentiment(std::string_view text, const Lexicon& lexicon);

/// (s + 1) / 2.
double sentiment_to_quality(const SentimentScore& s);
double sentiment_to_quality(double value);
/// 2q - 1.
double quality_to_sentiment(double quality);

/// Anything that can turn utterances into sentiment scores.
class SentimentScorer {
 public:
  virtual ~SentimentScorer() = default;
  virtual std::vector<SentimentScore> score(std::span<const std::string> texts) = 0;
  SentimentScore score_one(std::string_view text);
};

class LexiconSentimentScorer final : public SentimentScorer {
 public:
  explicit LexiconSentimentScorer(const Lexicon& lexicon) : lexicon_(lexicon) {}
  std::vector<SentimentScore> score(std::span<const std::string> texts) override;

 private:
  const Lexicon& lexicon_;
};

/// Routes through the backend's /v1/sentiment endpoint.
class BackendSentimentScorer final : public SentimentScorer {
 public:
  explicit BackendSentimentScorer(InferenceBackend& backend) : backend_(backend) {}
  std::vector<SentimentScore> score(std::span<const std::string> texts) override;

 private:
  InferenceBackend& backend_;
};

}  // namespace dialeval
