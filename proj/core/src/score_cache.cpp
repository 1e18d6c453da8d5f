// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "dialeval/score_cache.hpp"

#include "dialeval/digest.hpp"
#include "dialeval/error.hpp"

namespace dialeval {

ScoreCache::ScoreCache(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create cache directory " + dir.string());
  const auto file = dir / "scores.jsonl";
  if (std::ifstream in(file); in) {
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
      if (j.is_discarded() || !j.contains("key") || !j["key"].is_string() ||
          !j.contains("value")) {
        continue;
      }
      entries_[j["key"].get<std::string>()] = j["value"];
    }
  }
  log_.open(file, std::ios::app);
  if (!log_) throw ConfigError("cannot open cache file " + file.string());
}

std::string ScoreCache::make_key(std::string_view scorer_id, std::string_view config_hash,
                                 std::string_view canonical_context) {
  std::string material;
  material.reserve(scorer_id.size() + config_hash.size() + canonical_context.size() + 2);
  material.append(scorer_id).push_back('\0');
  material.append(config_hash).push_back('\0');
  material.append(canonical_context);
  return sha256_hex(material);
}

std::optional<nlohmann::json> ScoreCache::get(const std::string& key) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  return std::optional<nlohmann::json>(std::in_place, it->second);
}

void ScoreCache::put(const std::string& key, const nlohmann::json& value) {
  std::unique_lock lock(mu_);
  entries_[key] = value;
  if (log_.is_open()) {
    log_ << nlohmann::json{{"key", key}, {"value", value}}.dump() << '\n';
    log_.flush();
  }
}

std::size_t ScoreCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

std::size_t ScoreCache::hits() const { return hits_.load(); }

std::size_t ScoreCache::misses() const { return misses_.load(); }

}  // namespace dialeval
