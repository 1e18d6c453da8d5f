// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "dialeval/dialog.hpp"

#include <algorithm>
#include <numeric>

#include "dialeval/error.hpp"

namespace dialeval {
namespace {

using nlohmann::json;

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  });
}

std::string fmt_num(double v) {
  json j = v;
  return j.dump();
}

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> read_optional_number(const json& obj, const char* key,
                                           const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) {
    throw DataError(where + "field '" + key + "' must be a number or null");
  }
  return it->get<double>();
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw DataError(where + "missing field '" + key + "'");
  }
  return *it;
}

std::string require_string(const json& obj, const char* key,
                           const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) {
    throw DataError(where + "field '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

Turn turn_from_json(const json& j, std::size_t position) {
  const std::string where = "turns[" + std::to_string(position) + "]: ";
  if (!j.is_object()) throw DataError(where + "turn must be an object");
  Turn t;
  const json& idx = require(j, "index", where);
  if (!idx.is_number_integer() || idx.get<long long>() < 0) {
    throw DataError(where + "field 'index' must be a non-negative integer");
  }
  t.index = idx.get<std::size_t>();
  try {
    t.speaker = parse_speaker(require_string(j, "speaker", where));
  } catch (const DataError& e) {
    throw DataError(where + "field 'speaker': " + e.what());
  }
  t.text = require_string(j, "text", where);
  t.quality_label = read_optional_number(j, "quality_label", where);
  t.sentiment = read_optional_number(j, "sentiment", where);
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    if (k != "index" && k != "speaker" && k != "text" && k != "quality_label" &&
        k != "sentiment") {
      t.extra[k] = it.value();
    }
  }
  return t;
}

}  // namespace

std::string_view to_string(Speaker s) {
  return s == Speaker::kUser ? "user" : "system";
}

Speaker parse_speaker(std::string_view s) {
  if (s == "user") return Speaker::kUser;
  if (s == "system") return Speaker::kSystem;
  throw DataError("unknown speaker '" + std::string(s) + "'");
}

std::vector<std::string> validate_dialog(const Dialog& d) {
  std::vector<std::string> out;
  if (d.id.empty()) out.emplace_back("empty dialog id");
  if (d.turns.empty()) out.emplace_back(kNoTurnsViolation);
  for (std::size_t i = 0; i < d.turns.size(); ++i) {
    const Turn& t = d.turns[i];
    if (t.index != i) {
      out.push_back("non-contiguous index at position " + std::to_string(i) +
                    " (found " + std::to_string(t.index) + ")");
    }
    if (is_blank(t.text)) {
      out.push_back("empty text at index " + std::to_string(i));
    }
    if (t.quality_label && !(*t.quality_label >= 0.0 && *t.quality_label <= 1.0)) {
      out.push_back("quality_label out of [0,1] at index " + std::to_string(i) +
                    ": " + fmt_num(*t.quality_label));
    }
    if (t.sentiment && !(*t.sentiment >= -1.0 && *t.sentiment <= 1.0)) {
      out.push_back("sentiment out of [-1,1] at index " + std::to_string(i) +
                    ": " + fmt_num(*t.sentiment));
    }
  }
  auto rating_ok = [](double r) { return r >= kMinRating && r <= kMaxRating; };
  if (d.first_party_rating && !rating_ok(*d.first_party_rating)) {
    out.push_back("rating out of [1,5]: first_party_rating " +
                  fmt_num(*d.first_party_rating));
  }
  for (std::size_t i = 0; i < d.third_party_ratings.size(); ++i) {
    if (!rating_ok(d.third_party_ratings[i])) {
      out.push_back("rating out of [1,5]: third_party_ratings[" +
                    std::to_string(i) + "] " + fmt_num(d.third_party_ratings[i]));
    }
  }
  return out;
}

namespace {

void require_valid_for_contexts(const Dialog& d) {
  for (const auto& v : validate_dialog(d)) {
    if (v != kNoTurnsViolation) {
      throw DataError("dialog '" + d.id + "' is invalid: " + v);
    }
  }
}

DialogContext make_context(const Dialog& d, std::size_t target,
                           std::optional<std::size_t> window) {
  std::size_t keep = target + 1;
  if (window) keep = std::min(*window, keep);
  DialogContext ctx;
  ctx.dialog_id = d.id;
  ctx.target_index = target;
  ctx.turns.assign(d.turns.begin() + static_cast<std::ptrdiff_t>(target + 1 - keep),
                   d.turns.begin() + static_cast<std::ptrdiff_t>(target + 1));
  return ctx;
}

void check_window(std::optional<std::size_t> window) {
  if (window && *window == 0) {
    throw ConfigError("context window must be a positive integer");
  }
}

}  // namespace

std::vector<DialogContext> system_turn_contexts(const Dialog& d,
                                                std::optional<std::size_t> window) {
  check_window(window);
  require_valid_for_contexts(d);
  std::vector<DialogContext> out;
  for (const Turn& t : d.turns) {
    if (t.speaker == Speaker::kSystem) out.push_back(make_context(d, t.index, window));
  }
  return out;
}

DialogContext context_for(const Dialog& d, std::size_t system_index,
                          std::optional<std::size_t> window) {
  check_window(window);
  if (system_index >= d.turns.size() ||
      d.turns[system_index].speaker != Speaker::kSystem) {
    throw DataError("dialog '" + d.id + "': index " + std::to_string(system_index) +
                    " is not a system turn");
  }
  return make_context(d, system_index, window);
}

std::optional<Turn> next_user_turn(const Dialog& d, std::size_t system_index) {
  if (system_index >= d.turns.size() ||
      d.turns[system_index].speaker != Speaker::kSystem) {
    throw DataError("dialog '" + d.id + "': index " + std::to_string(system_index) +
                    " is not a system turn");
  }
  for (std::size_t i = system_index + 1; i < d.turns.size(); ++i) {
    if (d.turns[i].speaker == Speaker::kUser) return d.turns[i];
  }
  return std::nullopt;
}

std::optional<double> third_party_mean(const Dialog& d) {
  if (d.third_party_ratings.empty()) return std::nullopt;
  double sum = std::accumulate(d.third_party_ratings.begin(),
                               d.third_party_ratings.end(), 0.0);
  return sum / static_cast<double>(d.third_party_ratings.size());
}

json to_json(const Turn& t) {
  json j = t.extra.is_object() ? t.extra : json::object();
  j["index"] = t.index;
  j["speaker"] = to_string(t.speaker);
  j["text"] = t.text;
  j["quality_label"] = optional_number(t.quality_label);
  j["sentiment"] = optional_number(t.sentiment);
  return j;
}

json to_json(const Dialog& d) {
  json j = d.extra.is_object() ? d.extra : json::object();
  j["id"] = d.id;
  j["source"] = d.source;
  json turns = json::array();
  for (const Turn& t : d.turns) turns.push_back(to_json(t));
  j["turns"] = std::move(turns);
  j["first_party_rating"] = optional_number(d.first_party_rating);
  j["third_party_ratings"] = d.third_party_ratings;
  j["feedback"] = d.feedback ? json(*d.feedback) : json(nullptr);
  return j;
}

Dialog dialog_from_json(const json& j) {
  if (!j.is_object()) throw DataError("dialog record must be a JSON object");
  const std::string where;
  Dialog d;
  d.id = require_string(j, "id", where);
  auto src = j.find("source");
  if (src != j.end() && !src->is_null()) {
    if (!src->is_string()) throw DataError("field 'source' must be a string");
    d.source = src->get<std::string>();
  }
  const json& turns = require(j, "turns", where);
  if (!turns.is_array()) throw DataError("field 'turns' must be an array");
  d.turns.reserve(turns.size());
  for (std::size_t i = 0; i < turns.size(); ++i) {
    d.turns.push_back(turn_from_json(turns[i], i));
  }
  d.first_party_rating = read_optional_number(j, "first_party_rating", where);
  auto tp = j.find("third_party_ratings");
  if (tp != j.end() && !tp->is_null()) {
    if (!tp->is_array()) throw DataError("field 'third_party_ratings' must be an array");
    for (const auto& r : *tp) {
      if (!r.is_number()) {
        throw DataError("field 'third_party_ratings' must contain only numbers");
      }
      d.third_party_ratings.push_back(r.get<double>());
    }
  }
  auto fb = j.find("feedback");
  if (fb != j.end() && !fb->is_null()) {
    if (!fb->is_string()) throw DataError("field 'feedback' must be a string or null");
    d.feedback = fb->get<std::string>();
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    if (k != "id" && k != "source" && k != "turns" && k != "first_party_rating" &&
        k != "third_party_ratings" && k != "feedback") {
      d.extra[k] = it.value();
    }
  }
  return d;
}

json context_to_json(const std::vector<Turn>& turns) {
  json arr = json::array();
  for (const Turn& t : turns) {
    arr.push_back({{"speaker", to_string(t.speaker)}, {"text", t.text}});
  }
  return arr;
}

json context_to_json(const DialogContext& ctx) { return context_to_json(ctx.turns); }

}  // namespace dialeval
