// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "dialeval/aggregation.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <tuple>

#include "dialeval/error.hpp"
#include "json_util.hpp"

namespace dialeval {

WeightScheme WeightScheme::exponential(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ConfigError("exponential decay must lie in (0,1], got " + nlohmann::json(gamma).dump());
  }
  WeightScheme s;
  s.kind = Kind::kExponential;
  s.gamma = gamma;
  return s;
}

WeightScheme WeightScheme::last_k(std::size_t k) {
  if (k < 1) throw ConfigError("last:k requires k >= 1");
  WeightScheme s;
  s.kind = Kind::kLastK;
  s.k = k;
  return s;
}

std::string WeightScheme::to_string() const {
  switch (kind) {
    case Kind::kUniform: return "uniform";
    case Kind::kLinearPosition: return "linear";
    case Kind::kExponential: {
      char buf[32];
      auto res = std::to_chars(buf, buf + sizeof buf, gamma);
      return "exp:" + std::string(buf, res.ptr);
    }
    case Kind::kLastK: return "last:" + std::to_string(k);
  }
  return "unknown";
}

WeightScheme parse_weight_scheme(std::string_view s) {
  if (s == "uniform") return WeightScheme::uniform();
  if (s == "linear") return WeightScheme::linear();
  if (s == "exp") return WeightScheme::exponential();
  auto bad = [&] { return ConfigError("unknown weight scheme '" + std::string(s) + "'"); };
  if (s.rfind("exp:", 0) == 0) {
    const auto arg = s.substr(4);
    double g = 0.0;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), g);
    if (ec != std::errc() || ptr != arg.data() + arg.size()) throw bad();
    return WeightScheme::exponential(g);
  }
  if (s.rfind("last:", 0) == 0) {
    const auto arg = s.substr(5);
    std::size_t k = 0;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), k);
    if (ec != std::errc() || ptr != arg.data() + arg.size()) throw bad();
    return WeightScheme::last_k(k);
  }
  throw bad();
}

std::vector<double> weights(const WeightScheme& scheme, std::size_t n) {
  if (n == 0) throw DataError("weights: need at least one scored turn");
  std::vector<double> w(n, 0.0);
  switch (scheme.kind) {
    case WeightScheme::Kind::kUniform:
      std::fill(w.begin(), w.end(), 1.0);
      break;
    case WeightScheme::Kind::kLinearPosition:
      for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<double>(i + 1);
      break;
    case WeightScheme::Kind::kExponential:
      if (scheme.gamma == 1.0) {
        std::fill(w.begin(), w.end(), 1.0);
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          w[i] = std::pow(scheme.gamma, static_cast<double>(n - 1 - i));
        }
      }
      break;
    case WeightScheme::Kind::kLastK: {
      const std::size_t keep = std::min(scheme.k, n);
      std::fill(w.end() - static_cast<std::ptrdiff_t>(keep), w.end(), 1.0);
      break;
    }
  }
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return w;
}

DialogScore aggregate(std::string_view dialog_id,
                      std::span<const std::optional<double>> turn_qualities,
                      const WeightScheme& scheme) {
  std::vector<double> present;
  present.reserve(turn_qualities.size());
  for (const auto& q : turn_qualities) {
    if (q) present.push_back(*q);
  }
  if (present.empty()) {
    throw InsufficientDataError("dialog '" + std::string(dialog_id) +
                                "' has no non-missing turn scores");
  }
  const auto w = weights(scheme, present.size());
  double q = 0.0;
  for (std::size_t i = 0; i < present.size(); ++i) q += w[i] * present[i];
  // Rounding can push a convex combination a hair past its extremes.
  const auto [lo, hi] = std::minmax_element(present.begin(), present.end());
  q = std::clamp(q, *lo, *hi);

  DialogScore out;
  out.dialog_id = std::string(dialog_id);
  out.quality = q;
  out.scheme = scheme;
  out.n_turns_used = present.size();
  out.n_missing = turn_qualities.size() - present.size();
  return out;
}

AggregateRun aggregate_run(const ScoreRun& run, const WeightScheme& scheme) {
  using Key = std::tuple<std::string, std::string, std::string>;  // scorer, hash, dialog
  std::map<Key, std::map<std::size_t, std::optional<double>>> groups;
  std::vector<Key> order;
  auto slot = [&](const Key& k) -> auto& {
    auto [it, inserted] = groups.try_emplace(k);
    if (inserted) order.push_back(k);
    return it->second;
  };
  // Keep dialog_order first so groups follow corpus order.
  std::map<std::string, std::size_t> rank;
  for (std::size_t i = 0; i < run.dialog_order.size(); ++i) rank.emplace(run.dialog_order[i], i);
  for (const auto& s : run.scores) slot({s.scorer_id, s.config_hash, s.dialog_id})[s.target_index] = s.quality;
  for (const auto& m : run.missing) slot({m.scorer_id, m.config_hash, m.dialog_id})[m.target_index] = std::nullopt;
  std::stable_sort(order.begin(), order.end(), [&](const Key& a, const Key& b) {
    auto ra = rank.count(std::get<2>(a)) ? rank[std::get<2>(a)] : rank.size();
    auto rb = rank.count(std::get<2>(b)) ? rank[std::get<2>(b)] : rank.size();
    return ra < rb;
  });

  AggregateRun out;
  for (const Key& k : order) {
    std::vector<std::optional<double>> qs;
    for (const auto& [idx, q] : groups[k]) qs.push_back(q);
    const auto& [scorer, hash, dialog] = k;
    try {
      DialogScore ds = aggregate(dialog, qs, scheme);
      ds.scorer_id = scorer;
      ds.config_hash = hash;
      out.scores.push_back(std::move(ds));
    } catch (const InsufficientDataError&) {
      out.unscorable.push_back(dialog);
    }
  }
  return out;
}

double rescale_to_rating(double q, double lo, double hi) {
  if (!(lo < hi)) throw DataError("rescale_to_rating: need lo < hi");
  if (!(q >= 0.0 && q <= 1.0)) {
    throw DataError("rescale_to_rating: quality out of [0,1]: " + nlohmann::json(q).dump());
  }
  return lo + (hi - lo) * q;
}

nlohmann::json to_json(const DialogScore& s) {
  return {{"dialog_id", s.dialog_id},   {"quality", s.quality},
          {"scheme", s.scheme.to_string()}, {"n_turns_used", s.n_turns_used},
          {"n_missing", s.n_missing},   {"scorer_id", s.scorer_id},
          {"config_hash", s.config_hash}};
}

DialogScore dialog_score_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("dialog score must be an object");
  auto str = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_string()) {
      throw DataError(std::string("dialog score: missing string field '") + key + "'");
    }
    return j[key].get<std::string>();
  };
  auto count = [&](const char* key) {
    if (!j.contains(key) || !detail::is_count(j[key])) {
      throw DataError(std::string("dialog score: missing count field '") + key + "'");
    }
    return j[key].get<std::size_t>();
  };
  DialogScore s;
  s.dialog_id = str("dialog_id");
  if (!j.contains("quality") || !j["quality"].is_number()) {
    throw DataError("dialog score: missing numeric 'quality'");
  }
  s.quality = j["quality"].get<double>();
  if (!(s.quality >= 0.0 && s.quality <= 1.0)) {
    throw DataError("dialog score: quality out of [0,1]");
  }
  try {
    s.scheme = parse_weight_scheme(str("scheme"));
  } catch (const ConfigError& e) {
    throw DataError(std::string("dialog score: ") + e.what());
  }
  s.n_turns_used = count("n_turns_used");
  s.n_missing = count("n_missing");
  s.scorer_id = j.contains("scorer_id") && j["scorer_id"].is_string() ? str("scorer_id") : "";
  s.config_hash =
      j.contains("config_hash") && j["config_hash"].is_string() ? str("config_hash") : "";
  return s;
}

}  // namespace dialeval
