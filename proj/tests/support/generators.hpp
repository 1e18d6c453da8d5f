// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>
#include <string>
#include <vector>

#include "dialeval/dialog.hpp"
#include "dialeval/sentiment.hpp"

namespace dialeval::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  std::size_t size(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool coin(double p = 0.5) { return uniform() < p; }

  std::vector<double> vec(std::size_t n, double lo = -10.0, double hi = 10.0) {
    std::vector<double> v(n);
    for (auto& e : v) e = uniform(lo, hi);
    return v;
  }

  /// Vector with repeated values, so rank ties occur.
  std::vector<double> tied_vec(std::size_t n) {
    std::vector<double> v(n);
    for (auto& e : v) e = static_cast<double>(size(0, n / 2 + 1));
    return v;
  }

  template <typename C>
  const auto& pick(const C& c) {
    auto it = c.begin();
    std::advance(it, size(0, c.size() - 1));
    return *it;
  }

  /// Text built from lexicon words and filler, never containing negators.
  std::string negator_free_text(const Lexicon& lex, std::size_t max_tokens = 12) {
    static const std::vector<std::string> filler{"the", "a", "movie", "weather", "it", "was"};
    std::string out;
    const std::size_t n = size(0, max_tokens);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = uniform();
      const std::string& w = r < 0.3 ? pick(lex.positive) : r < 0.6 ? pick(lex.negative) : pick(filler);
      out += (i ? " " : "") + w;
    }
    return out;
  }

  /// Valid dialog with random speakers, labels, ratings and extras.
  Dialog dialog(const std::string& id) {
    Dialog d;
    d.id = id;
    d.source = "gen";
    const std::size_t n = size(1, 9);
    for (std::size_t i = 0; i < n; ++i) {
      Turn t;
      t.index = i;
      t.speaker = coin() ? Speaker::kUser : Speaker::kSystem;
      t.text = "turn " + std::to_string(i) + (coin() ? " été \"quoted\"\n" : "");
      if (t.speaker == Speaker::kSystem && coin(0.7)) t.quality_label = uniform();
      if (t.speaker == Speaker::kUser && coin(0.3)) t.sentiment = uniform(-1.0, 1.0);
      if (coin(0.2)) t.extra["note"] = "x" + std::to_string(i);
      d.turns.push_back(std::move(t));
    }
    if (coin()) d.first_party_rating = uniform(1.0, 5.0);
    for (std::size_t k = size(0, 3); k > 0; --k) d.third_party_ratings.push_back(uniform(1.0, 5.0));
    if (coin(0.2)) d.feedback = "thanks";
    if (coin(0.2)) d.extra["split"] = "dev";
    return d;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace dialeval::testing
