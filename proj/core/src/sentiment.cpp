// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "dialeval/sentiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "dialeval/backend.hpp"
#include "dialeval/digest.hpp"
#include "dialeval/error.hpp"
#include "json_util.hpp"

namespace dialeval {

namespace detail {
extern const char* const kDefaultLexiconJson;
}

SentimentScore SentimentScore::from_probabilities(double negative, double neutral,
                                                  double positive) {
  for (double p : {negative, neutral, positive}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ProtocolError("sentiment probability out of [0,1]: " +
                          nlohmann::json(p).dump());
    }
  }
  const double sum = negative + neutral + positive;
  if (std::abs(sum - 1.0) > kProbabilitySumTolerance) {
    throw ProtocolError("sentiment probabilities sum to " + nlohmann::json(sum).dump() +
                        ", expected 1");
  }
  SentimentScore s;
  s.value = std::clamp(positive - negative, -1.0, 1.0);
  s.class_probabilities = std::array<double, 3>{negative, neutral, positive};
  return s;
}

void Lexicon::validate() const {
  if (positive.empty()) throw ConfigError("lexicon: positive set is empty");
  if (negative.empty()) throw ConfigError("lexicon: negative set is empty");
  for (const auto& w : positive) {
    if (negative.count(w)) {
      throw ConfigError("lexicon: '" + w + "' is both positive and negative");
    }
  }
  if (negation_window == 0) throw ConfigError("lexicon: negation_window must be >= 1");
}

std::string Lexicon::digest() const {
  nlohmann::json j = {{"positive", positive},
                      {"negative", negative},
                      {"negators", negators},
                      {"negation_window", negation_window}};
  return sha256_hex(j.dump());
}

Lexicon Lexicon::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("lexicon must be a JSON object");
  auto read_set = [&](const char* key, bool required) {
    std::set<std::string> out;
    auto it = j.find(key);
    if (it == j.end()) {
      if (required) throw ConfigError(std::string("lexicon: missing '") + key + "'");
      return out;
    }
    if (!it->is_array()) throw ConfigError(std::string("lexicon: '") + key + "' must be an array");
    for (const auto& w : *it) {
      if (!w.is_string()) throw ConfigError(std::string("lexicon: '") + key + "' must hold strings");
      std::string s = w.get<std::string>();
      std::transform(s.begin(), s.end(), s.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      out.insert(std::move(s));
    }
    return out;
  };
  Lexicon lex;
  lex.positive = read_set("positive", true);
  lex.negative = read_set("negative", true);
  lex.negators = read_set("negators", false);
  if (auto it = j.find("negation_window"); it != j.end()) {
    if (!detail::is_count(*it) || it->get<std::int64_t>() < 1) {
      throw ConfigError("lexicon: 'negation_window' must be a positive integer");
    }
    lex.negation_window = it->get<std::size_t>();
  }
  lex.validate();
  return lex;
}

Lexicon Lexicon::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read lexicon file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("lexicon file " + path + ": " + e.what());
  }
  return from_json(j);
}

const Lexicon& Lexicon::builtin() {
  static const Lexicon lex = from_json(nlohmann::json::parse(detail::kDefaultLexiconJson));
  return lex;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

SentimentScore lexicon_sentiment(std::string_view text, const Lexicon& lexicon) {
  const auto tokens = tokenize(text);
  long pos = 0;
  long neg = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    int polarity = 0;
    if (lexicon.positive.count(tokens[i])) {
      polarity = 1;
    } else if (lexicon.negative.count(tokens[i])) {
      polarity = -1;
    }
    if (polarity == 0) continue;
    const std::size_t first = i >= lexicon.negation_window ? i - lexicon.negation_window : 0;
    for (std::size_t j = first; j < i; ++j) {
      if (lexicon.negators.count(tokens[j])) {
        polarity = -polarity;
        break;
      }
    }
    (polarity > 0 ? pos : neg) += 1;
  }
  SentimentScore s;
  if (pos + neg > 0) {
    s.value = static_cast<double>(pos - neg) / static_cast<double>(pos + neg);
  }
  return s;
}

double sentiment_to_quality(double value) { return (value + 1.0) / 2.0; }

double sentiment_to_quality(const SentimentScore& s) { return sentiment_to_quality(s.value); }

double quality_to_sentiment(double quality) { return 2.0 * quality - 1.0; }

SentimentScore SentimentScorer::score_one(std::string_view text) {
  const std::string t(text);
  auto out = score(std::span<const std::string>(&t, 1));
  if (out.size() != 1) {
    throw ProtocolError("sentiment scorer returned " + std::to_string(out.size()) +
                        " scores for 1 text");
  }
  return out.front();
}

std::vector<SentimentScore> LexiconSentimentScorer::score(
    std::span<const std::string> texts) {
  std::vector<SentimentScore> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(lexicon_sentiment(t, lexicon_));
  return out;
}

std::vector<SentimentScore> BackendSentimentScorer::score(
    std::span<const std::string> texts) {
  return backend_.sentiment(texts);
}

}  // namespace dialeval
