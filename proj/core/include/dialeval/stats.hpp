// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dialeval {

/// Predictions and human targets, aligned element-wise. `labels` names
/// where each pair came from.
struct PairedSamples {
  struct Label {
    std::string dialog_id;
    std::optional<std::size_t> turn_index;
    bool operator==(const Label&) const = default;
  };

  std::vector<double> predictions;
  std::vector<double> targets;
  std::vector<Label> labels;

  std::size_t size() const { return predictions.size(); }
  /// Throws InsufficientDataError unless all three have equal length >= 2.
  void validate() const;
};

/// Sample Pearson correlation. Throws InsufficientDataError for mismatched
/// or too-short input, UndefinedCorrelationError when either side has zero
/// variance. The result is clamped to [-1,1] after checking that any
/// overshoot is below 1e-9.
double pearson(std::span<const double> x, std::span<const double> y);

/// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> x);

/// Pearson over average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

struct ConfidenceInterval {
  double low = 0.0;
  double high = 0.0;
  bool operator==(const ConfidenceInterval&) const = default;
};

/// Paired percentile bootstrap of the Pearson correlation.
///
/// Resample indices are drawn as mt19937_64(seed)() % n. Resamples in which
/// either side has zero variance are discarded and redrawn (giving up with
/// InsufficientDataError after 100*B draws). The interval takes the
/// (1-level)/2 and (1+level)/2 quantiles of the B correlations, with linear
/// interpolation between order statistics.
ConfidenceInterval bootstrap_ci(const PairedSamples& samples, std::size_t resamples,
                                std::uint64_t seed, double level = 0.95);

inline constexpr std::size_t kMinBootstrapResamples = 100;

/// Linear-interpolation quantile of sorted data, p in [0,1].
double sorted_quantile(std::span<const double> sorted, double p);

}  // namespace dialeval
