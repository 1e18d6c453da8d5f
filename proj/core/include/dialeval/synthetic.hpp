// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dialeval/dialog.hpp"

namespace dialeval {

/// Knobs for a corpus whose ratings are driven by recency-weighted turn
/// quality. Every system turn is followed by a user turn made of
/// `quality_levels` lexicon words ("good"/"bad"), so the builtin lexicon
/// recovers the turn quality exactly as (#good / quality_levels).
struct RecencyCorpusParams {
  std::size_t dialogs = 200;
  std::size_t min_system_turns = 4;
  std::size_t max_system_turns = 12;
  /// True rating weight of system turn i of n is decay^(n-1-i).
  double decay = 0.6;
  /// Std. dev. of Gaussian noise added to the weighted mean (on [0,1]).
  double noise_sd = 0.05;
  std::size_t quality_levels = 10;
};

/// Deterministic for a given seed. Turn labels carry the true qualities;
/// 1P and 3P ratings are 1 + 4 * clamp(weighted mean + noise) with
/// independent noise draws.
std::vector<Dialog> make_recency_corpus(const RecencyCorpusParams& params, std::uint64_t seed);

}  // namespace dialeval
