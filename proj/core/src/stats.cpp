// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "dialeval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dialeval/error.hpp"

namespace dialeval {
namespace {

void check_lengths(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw InsufficientDataError("correlation: vectors differ in length (" +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) {
    throw InsufficientDataError("correlation: need at least 2 pairs, got " +
                                std::to_string(x.size()));
  }
}

bool constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
}

}  // namespace

void PairedSamples::validate() const {
  if (predictions.size() != targets.size() || predictions.size() != labels.size()) {
    throw InsufficientDataError("paired samples: predictions, targets and labels differ in length");
  }
  if (predictions.size() < 2) {
    throw InsufficientDataError("paired samples: need at least 2 pairs, got " +
                                std::to_string(predictions.size()));
  }
}

double pearson(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y);
  if (constant(x) || constant(y)) {
    throw UndefinedCorrelationError("undefined correlation: zero variance");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    throw UndefinedCorrelationError("undefined correlation: zero variance");
  }
  const double r = sxy / std::sqrt(sxx * syy);
  if (std::abs(r) > 1.0 + 1e-9) {
    throw Error("pearson: numerical overshoot " + std::to_string(r));
  }
  return std::clamp(r, -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    // Positions i..j (0-based) hold ranks i+1..j+1.
    const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

double sorted_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InsufficientDataError("quantile of empty data");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

ConfidenceInterval bootstrap_ci(const PairedSamples& samples, std::size_t resamples,
                                std::uint64_t seed, double level) {
  samples.validate();
  if (resamples < kMinBootstrapResamples) {
    throw ConfigError("bootstrap needs at least " + std::to_string(kMinBootstrapResamples) +
                      " resamples, got " + std::to_string(resamples));
  }
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("bootstrap level must lie in (0,1)");

  const std::size_t n = samples.size();
  std::mt19937_64 rng(seed);
  std::vector<double> rs;
  rs.reserve(resamples);
  std::vector<double> bx(n), by(n);
  const std::size_t max_draws = 100 * resamples;
  std::size_t draws = 0;
  while (rs.size() < resamples) {
    if (draws++ >= max_draws) {
      throw InsufficientDataError("bootstrap: too many degenerate resamples");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(rng() % n);
      bx[i] = samples.predictions[k];
      by[i] = samples.targets[k];
    }
    if (constant(bx) || constant(by)) continue;
    try {
      rs.push_back(pearson(bx, by));
    } catch (const UndefinedCorrelationError&) {
    }
  }
  std::sort(rs.begin(), rs.end());
  const double alpha = 1.0 - level;
  return {sorted_quantile(rs, alpha / 2.0), sorted_quantile(rs, 1.0 - alpha / 2.0)};
}

}  // namespace dialeval
