// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "dialeval/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "dialeval/error.hpp"

namespace dialeval {
namespace {

// Portable draws; std:: distributions differ between standard libraries.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t uniform_int(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

double gaussian(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

std::vector<Dialog> make_recency_corpus(const RecencyCorpusParams& p, std::uint64_t seed) {
  if (p.min_system_turns < 1 || p.max_system_turns < p.min_system_turns) {
    throw ConfigError("recency corpus: bad system turn range");
  }
  if (!(p.decay > 0.0 && p.decay <= 1.0)) throw ConfigError("recency corpus: decay must lie in (0,1]");
  if (p.quality_levels < 1) throw ConfigError("recency corpus: quality_levels must be >= 1");

  std::mt19937_64 rng(seed);
  std::vector<Dialog> out;
  out.reserve(p.dialogs);
  for (std::size_t di = 0; di < p.dialogs; ++di) {
    Dialog d;
    d.id = "synthetic-" + std::to_string(di);
    d.source = "synthetic_recency";
    auto add = [&](Speaker s, std::string text, std::optional<double> label = std::nullopt) {
      Turn t;
      t.index = d.turns.size();
      t.speaker = s;
      t.text = std::move(text);
      t.quality_label = label;
      d.turns.push_back(std::move(t));
    };
    add(Speaker::kUser, "hello there");
    const std::size_t n = uniform_int(rng, p.min_system_turns, p.max_system_turns);
    double weighted = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t good = uniform_int(rng, 0, p.quality_levels);
      const double q = static_cast<double>(good) / static_cast<double>(p.quality_levels);
      const double w = std::pow(p.decay, static_cast<double>(n - 1 - i));
      weighted += w * q;
      total += w;
      add(Speaker::kSystem, "system response " + std::to_string(i), q);
      std::vector<std::string> words(good, "good");
      words.resize(p.quality_levels, "bad");
      for (std::size_t k = words.size(); k > 1; --k) {
        std::swap(words[k - 1], words[uniform_int(rng, 0, k - 1)]);
      }
      std::string reply;
      for (const auto& w2 : words) reply += (reply.empty() ? "" : " ") + w2;
      add(Speaker::kUser, reply);
    }
    const double m = weighted / total;
    auto rating = [&] { return 1.0 + 4.0 * std::clamp(m + p.noise_sd * gaussian(rng), 0.0, 1.0); };
    d.third_party_ratings.push_back(rating());
    d.first_party_rating = rating();
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace dialeval
