// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <initializer_list>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dialeval/dialog.hpp"

namespace dialeval::testing {

struct T {
  char who;  // 'u' or 's'
  std::string text;
  std::optional<double> label = std::nullopt;
};

inline Dialog make_dialog(std::string id, std::initializer_list<T> turns,
                          std::optional<double> first_party = std::nullopt,
                          std::vector<double> third_party = {}) {
  Dialog d;
  d.id = std::move(id);
  d.source = "test";
  std::size_t i = 0;
  for (const auto& t : turns) {
    Turn turn;
    turn.index = i++;
    turn.speaker = t.who == 'u' ? Speaker::kUser : Speaker::kSystem;
    turn.text = t.text;
    turn.quality_label = t.label;
    d.turns.push_back(std::move(turn));
  }
  d.first_party_rating = first_party;
  d.third_party_ratings = std::move(third_party);
  return d;
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("dialeval-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& name = "") const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace dialeval::testing
