// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace dialeval {

/// Content-addressed store of turn-score JSON. Keys are SHA-256 over
/// (scorer id, config hash, canonical context JSON). On disk it is an
/// append-only JSONL file of {"key": ..., "value": ...}; later lines win.
/// Safe for concurrent get/put.
class ScoreCache {
 public:
  /// In-memory only.
  ScoreCache() = default;
  /// Loads `<dir>/scores.jsonl` if present and appends new entries to it.
  /// A truncated trailing line (interrupted write) is ignored.
  explicit ScoreCache(const std::filesystem::path& dir);

  ScoreCache(const ScoreCache&) = delete;
  ScoreCache& operator=(const ScoreCache&) = delete;

  static std::string make_key(std::string_view scorer_id, std::string_view config_hash,
                              std::string_view canonical_context);

  std::optional<nlohmann::json> get(const std::string& key) const;
  void put(const std::string& key, const nlohmann::json& value);

  std::size_t size() const;
  std::size_t hits() const;
  std::size_t misses() const;

 private:
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, nlohmann::json> entries_;
  std::ofstream log_;
  mutable std::atomic<std::size_t> hits_{0};
  mutable std::atomic<std::size_t> misses_{0};
};

}  // namespace dialeval
