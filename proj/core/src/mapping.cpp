// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "dialeval/error.hpp"
#include "dialeval/ingestion.hpp"
#include "json_util.hpp"

namespace dialeval {

namespace detail {
extern const char* const kFedMappingJson;
extern const char* const kDstc9MappingJson;
}  // namespace detail

using nlohmann::json;

namespace {

json::json_pointer pointer(const std::string& path) {
  try {
    return json::json_pointer(path);
  } catch (const json::exception& e) {
    throw ConfigError("mapping: invalid JSON pointer '" + path + "': " + e.what());
  }
}

const json* resolve(const json& doc, const std::string& path) {
  const auto ptr = pointer(path);
  if (!doc.contains(ptr)) return nullptr;
  return &doc.at(ptr);
}

const json& resolve_required(const json& doc, const std::string& path,
                             const std::string& where) {
  const json* v = resolve(doc, path);
  if (!v) throw DataError(where + "unresolvable path '" + path + "'");
  return *v;
}

std::optional<std::string> opt_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ConfigError(std::string("mapping: '") + key + "' must be a string");
  return it->get<std::string>();
}

std::string req_string(const json& j, const char* key, const char* ctx) {
  auto v = opt_string(j, key);
  if (!v) throw ConfigError(std::string("mapping: ") + ctx + " needs '" + key + "'");
  return *v;
}

std::vector<std::string> string_list(const json& j, const char* key) {
  std::vector<std::string> out;
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return out;
  if (it->is_string()) return {it->get<std::string>()};
  if (!it->is_array()) throw ConfigError(std::string("mapping: '") + key + "' must be a list");
  for (const auto& v : *it) {
    if (!v.is_string()) throw ConfigError(std::string("mapping: '") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::vector<double> numbers_at(const json& v, const std::string& where,
                               const std::string& path) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number()) throw DataError(where + "'" + path + "' must hold numbers");
      out.push_back(x.get<double>());
    }
  } else if (!v.is_null()) {
    throw DataError(where + "'" + path + "' must be a number or list of numbers");
  }
  return out;
}

std::string id_string(const json& v, const std::string& where, const std::string& path) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return v.dump();
  throw DataError(where + "'" + path + "' must be a string or integer id");
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string num(double v) { return json(v).dump(); }

}  // namespace

void FieldMapping::validate() const {
  if (turns && turns_text) {
    throw ConfigError("mapping: turns are mapped twice ('turns' and 'turns_text')");
  }
  if (!turns && !turns_text) throw ConfigError("mapping: one of 'turns' or 'turns_text' is required");
  if (user_tags.empty() || system_tags.empty()) {
    throw ConfigError("mapping: speaker_values must cover both user and system");
  }
  for (const auto& t : user_tags) {
    if (std::find(system_tags.begin(), system_tags.end(), t) != system_tags.end()) {
      throw ConfigError("mapping: speaker tag '" + t + "' maps to both user and system");
    }
  }
  auto check = [](const std::optional<std::string>& p) {
    if (p) pointer(*p);
  };
  pointer(records);
  for (const auto& p : require_absent) pointer(p);
  check(id);
  check(first_party_rating);
  check(third_party_ratings);
  check(feedback);
  if (turns) {
    pointer(turns->path);
    pointer(turns->speaker);
    pointer(turns->text);
    check(turns->label);
  }
  if (turns_text) {
    pointer(turns_text->path);
    if (turns_text->separator.empty()) throw ConfigError("mapping: empty turns_text separator");
  }
  if (annotations) {
    pointer(annotations->dialog_id);
    pointer(annotations->turn_index);
    pointer(annotations->label);
  }
}

FieldMapping FieldMapping::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("mapping must be a JSON object");
  FieldMapping m;
  m.source = opt_string(j, "source").value_or("external");
  m.records = opt_string(j, "records").value_or("");
  m.require_absent = string_list(j, "require_absent");
  m.id = opt_string(j, "id");
  if (auto it = j.find("turns"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw ConfigError("mapping: 'turns' must be an object");
    m.turns = TurnList{req_string(*it, "path", "turns"), req_string(*it, "speaker", "turns"),
                       req_string(*it, "text", "turns"), opt_string(*it, "label")};
  }
  if (auto it = j.find("turns_text"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw ConfigError("mapping: 'turns_text' must be an object");
    m.turns_text = TurnText{req_string(*it, "path", "turns_text"),
                            opt_string(*it, "separator").value_or("\n")};
  }
  if (auto it = j.find("speaker_values"); it != j.end()) {
    if (!it->is_object()) throw ConfigError("mapping: 'speaker_values' must be an object");
    for (auto sv = it->begin(); sv != it->end(); ++sv) {
      if (sv.key() != "user" && sv.key() != "system") {
        throw ConfigError("mapping: speaker_values key must be 'user' or 'system', got '" +
                          sv.key() + "'");
      }
    }
    m.user_tags = string_list(*it, "user");
    m.system_tags = string_list(*it, "system");
  }
  m.first_party_rating = opt_string(j, "first_party_rating");
  m.third_party_ratings = opt_string(j, "third_party_ratings");
  m.feedback = opt_string(j, "feedback");
  if (auto it = j.find("annotations"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw ConfigError("mapping: 'annotations' must be an object");
    m.annotations = AnnotationRecords{req_string(*it, "dialog_id", "annotations"),
                                      req_string(*it, "turn_index", "annotations"),
                                      req_string(*it, "label", "annotations")};
  }
  m.validate();
  return m;
}

FieldMapping FieldMapping::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read mapping file " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError("mapping file " + path.string() + ": " + e.what());
  }
}

FieldMapping FieldMapping::builtin(std::string_view name) {
  if (name == "fed") return from_json(json::parse(detail::kFedMappingJson));
  if (name == "dstc9") return from_json(json::parse(detail::kDstc9MappingJson));
  throw ConfigError("unknown builtin mapping '" + std::string(name) + "' (expected fed or dstc9)");
}

json parse_document(std::string_view text) {
  json whole = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (!whole.is_discarded()) return whole;
  json arr = json::array();
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    auto line = text.substr(start, end - start);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      try {
        arr.push_back(json::parse(line));
      } catch (const json::parse_error& e) {
        throw DataError("line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
      }
    }
    start = end + 1;
  }
  return arr;
}

namespace {

Speaker map_speaker(const FieldMapping& m, const std::string& tag, const std::string& where) {
  if (std::find(m.user_tags.begin(), m.user_tags.end(), tag) != m.user_tags.end()) {
    return Speaker::kUser;
  }
  if (std::find(m.system_tags.begin(), m.system_tags.end(), tag) != m.system_tags.end()) {
    return Speaker::kSystem;
  }
  throw DataError(where + "unmapped speaker tag '" + tag + "'");
}

std::optional<double> turn_label(const std::vector<double>& raw, LabelScale scale,
                                 const std::string& dialog_id, std::size_t turn) {
  if (raw.empty()) return std::nullopt;
  for (double v : raw) {
    if (!in_scale(v, scale)) {
      throw DataError("dialog '" + dialog_id + "' turn " + std::to_string(turn) +
                      ": label " + num(v) + " out of range for scale " +
                      std::string(to_string(scale)));
    }
  }
  return normalize_turn_label(mean(raw), scale);
}

void check_rating(double r, const std::string& dialog_id) {
  if (!(r >= kMinRating && r <= kMaxRating)) {
    throw DataError("dialog '" + dialog_id + "': rating " + num(r) + " out of [1,5]");
  }
}

std::vector<Turn> split_turn_text(const FieldMapping& m, const std::string& text,
                                  const std::string& where) {
  std::vector<Turn> turns;
  std::size_t start = 0;
  const auto& sep = m.turns_text->separator;
  while (start <= text.size()) {
    auto end = text.find(sep, start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    start = end + sep.size();
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto colon = line.find(':');
    std::optional<Speaker> speaker;
    if (colon != std::string::npos) {
      const std::string tag = line.substr(0, colon);
      if (std::find(m.user_tags.begin(), m.user_tags.end(), tag) != m.user_tags.end() ||
          std::find(m.system_tags.begin(), m.system_tags.end(), tag) != m.system_tags.end()) {
        speaker = map_speaker(m, tag, where);
      }
    }
    if (speaker) {
      std::string body = line.substr(colon + 1);
      body.erase(0, body.find_first_not_of(' '));
      Turn t;
      t.index = turns.size();
      t.speaker = *speaker;
      t.text = std::move(body);
      turns.push_back(std::move(t));
    } else if (!turns.empty()) {
      turns.back().text += "\n" + line;
    } else {
      throw DataError(where + "turn line without a mapped speaker prefix: '" + line + "'");
    }
  }
  return turns;
}

}  // namespace

std::vector<Dialog> adapt_external(const json& document, const FieldMapping& mapping,
                                   LabelScale scale) {
  mapping.validate();
  const json& records = resolve_required(document, mapping.records, "");
  if (!records.is_array()) {
    throw DataError("records path '" + mapping.records + "' does not point to an array");
  }
  std::vector<Dialog> out;
  std::size_t ordinal = 0;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const json& rec = records[r];
    const std::string where = "record " + std::to_string(r) + ": ";
    if (!rec.is_object()) throw DataError(where + "record must be an object");
    const bool skip = std::any_of(mapping.require_absent.begin(), mapping.require_absent.end(),
                                  [&](const std::string& p) { return resolve(rec, p) != nullptr; });
    if (skip) continue;

    Dialog d;
    d.source = mapping.source;
    d.id = mapping.id ? id_string(resolve_required(rec, *mapping.id, where), where, *mapping.id)
                      : mapping.source + "-" + std::to_string(ordinal);
    ++ordinal;
    const std::string dwhere = "dialog '" + d.id + "': ";

    if (mapping.turns) {
      const auto& tl = *mapping.turns;
      const json& arr = resolve_required(rec, tl.path, dwhere);
      if (!arr.is_array()) throw DataError(dwhere + "'" + tl.path + "' must be an array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string twhere = dwhere + "turn " + std::to_string(i) + ": ";
        const json& tj = arr[i];
        const json& tag = resolve_required(tj, tl.speaker, twhere);
        const json& text = resolve_required(tj, tl.text, twhere);
        if (!tag.is_string() || !text.is_string()) {
          throw DataError(twhere + "speaker and text must be strings");
        }
        Turn t;
        t.index = i;
        t.speaker = map_speaker(mapping, tag.get<std::string>(), twhere);
        t.text = text.get<std::string>();
        if (tl.label) {
          if (const json* lv = resolve(tj, *tl.label)) {
            t.quality_label = turn_label(numbers_at(*lv, twhere, *tl.label), scale, d.id, i);
          }
        }
        d.turns.push_back(std::move(t));
      }
    } else {
      const json& text = resolve_required(rec, mapping.turns_text->path, dwhere);
      if (!text.is_string()) {
        throw DataError(dwhere + "'" + mapping.turns_text->path + "' must be a string");
      }
      d.turns = split_turn_text(mapping, text.get<std::string>(), dwhere);
    }

    if (mapping.first_party_rating) {
      if (const json* v = resolve(rec, *mapping.first_party_rating); v && !v->is_null()) {
        if (!v->is_number()) throw DataError(dwhere + "first-party rating must be a number");
        check_rating(v->get<double>(), d.id);
        d.first_party_rating = v->get<double>();
      }
    }
    if (mapping.third_party_ratings) {
      if (const json* v = resolve(rec, *mapping.third_party_ratings)) {
        d.third_party_ratings = numbers_at(*v, dwhere, *mapping.third_party_ratings);
        for (double x : d.third_party_ratings) check_rating(x, d.id);
      }
    }
    if (mapping.feedback) {
      if (const json* v = resolve(rec, *mapping.feedback); v && v->is_string()) {
        d.feedback = v->get<std::string>();
      }
    }
    if (auto violations = validate_dialog(d); !violations.empty()) {
      throw DataError(dwhere + violations.front());
    }
    out.push_back(std::move(d));
  }
  return out;
}

void merge_turn_annotations(std::vector<Dialog>& dialogs, const json& records,
                            const FieldMapping& mapping, LabelScale scale) {
  if (!mapping.annotations) throw ConfigError("mapping has no 'annotations' layout");
  if (!records.is_array()) throw DataError("annotation document must be an array of records");
  const auto& layout = *mapping.annotations;
  std::map<std::pair<std::string, std::size_t>, std::vector<double>> values;
  std::vector<std::pair<std::string, std::size_t>> order;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const std::string where = "annotation record " + std::to_string(r) + ": ";
    const json& rec = records[r];
    const std::string id =
        id_string(resolve_required(rec, layout.dialog_id, where), where, layout.dialog_id);
    const json& idx = resolve_required(rec, layout.turn_index, where);
    if (!detail::is_count(idx)) throw DataError(where + "turn index must be a non-negative integer");
    auto key = std::make_pair(id, idx.get<std::size_t>());
    auto& bucket = values[key];
    if (bucket.empty()) order.push_back(key);
    auto v = numbers_at(resolve_required(rec, layout.label, where), where, layout.label);
    bucket.insert(bucket.end(), v.begin(), v.end());
  }
  std::map<std::string, Dialog*> by_id;
  for (auto& d : dialogs) by_id[d.id] = &d;
  for (const auto& key : order) {
    auto it = by_id.find(key.first);
    if (it == by_id.end()) throw DataError("annotation for unknown dialog '" + key.first + "'");
    Dialog& d = *it->second;
    if (key.second >= d.turns.size()) {
      throw DataError("dialog '" + d.id + "': annotation for missing turn " +
                      std::to_string(key.second));
    }
    if (auto label = turn_label(values[key], scale, d.id, key.second)) {
      d.turns[key.second].quality_label = label;
    }
  }
}

}  // namespace dialeval
