// abxkit/trial.hpp

// Copyright 2026 The abxkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "abxkit/error.hpp"
#include "abxkit/text.hpp"

namespace abxkit {

// Presentation order of an ABX item, written <first><second>_<match>:
// AB_A presents A then B and the probe is another token of A.
enum class ItemOrder { AB_A, BA_B, AB_B, BA_A };

enum class Position { first, second };

enum class Language { native, other };

inline constexpr std::array<ItemOrder, 4> kAllOrders = {
    ItemOrder::AB_A, ItemOrder::BA_B, ItemOrder::AB_B, ItemOrder::BA_A};

/// The probe matches the first-presented reference for AB_A and BA_B.
constexpr Position correct_position(ItemOrder order) {
  switch (order) {
    case ItemOrder::AB_A:
    case ItemOrder::BA_B: return Position::first;
    case ItemOrder::AB_B:
    case ItemOrder::BA_A: return Position::second;
  }
  return Position::first;
}

/// True when the probe is a token of the set's A reference.
constexpr bool probe_matches_a(ItemOrder order) {
  return order == ItemOrder::AB_A || order == ItemOrder::BA_A;
}

inline std::string_view to_string(ItemOrder order) {
  switch (order) {
    case ItemOrder::AB_A: return "AB_A";
    case ItemOrder::BA_B: return "BA_B";
    case ItemOrder::AB_B: return "AB_B";
    case ItemOrder::BA_A: return "BA_A";
  }
  return "?";
}

inline std::optional<ItemOrder> parse_order(std::string_view s) {
  for (ItemOrder order : kAllOrders)
    if (to_string(order) == s) return order;
  return std::nullopt;
}

inline std::string_view to_string(Position p) {
  return p == Position::first ? "first" : "second";
}

inline std::string_view to_string(Language lang) {
  return lang == Language::native ? "native" : "other";
}

inline std::optional<Language> parse_language(std::string_view s) {
  if (s == "native") return Language::native;
  if (s == "other") return Language::other;
  return std::nullopt;
}

struct Trial {
  std::string trial_id;
  std::string target_id;
  std::string other_id;
  std::string probe_id;
  ItemOrder order = ItemOrder::AB_A;
  std::string contrast;  // centre-phone pair, e.g. "eI:oU"
  std::string context;   // flanking phones, e.g. "s_k"
  Language language = Language::native;
  std::string ref_speaker;
  std::string probe_speaker;
  Position correct_position = Position::first;

  /// Stimulus IDs in presentation order (first reference, second reference).
  std::pair<const std::string&, const std::string&> presented() const {
    if (correct_position == Position::first) return {target_id, other_id};
    return {other_id, target_id};
  }
};

/// Key under which trials are grouped into contrasts.
inline std::string contrast_key(const Trial& t) {
  return std::string(to_string(t.language)) + "/" + t.contrast;
}

/// Throws ValidationError naming the trial if any invariant fails.
inline void validate_trial(const Trial& t) {
  auto fail = [&](const std::string& what) {
    throw ValidationError("trial '" + t.trial_id + "': " + what);
  };
  if (t.target_id == t.other_id) fail("target_id equals other_id");
  if (t.probe_id == t.target_id || t.probe_id == t.other_id)
    fail("probe_id equals a reference");
  if (t.ref_speaker == t.probe_speaker) fail("reference speaker equals probe speaker");
  if (t.correct_position != correct_position(t.order))
    fail("correct_position inconsistent with order");
}

inline constexpr std::array<std::string_view, 10> kTrialColumns = {
    "trial_id", "target_id",   "other_id", "probe_id",   "order",
    "contrast", "context",     "language", "ref_speaker", "probe_speaker"};

inline std::vector<Trial> read_trial_manifest(std::string_view content) {
  std::vector<Trial> trials;
  std::unordered_set<std::string_view> seen;
  for (const CsvRow& row : read_csv(content, kTrialColumns)) {
    const auto& f = row.fields;
    for (std::size_t k = 0; k < f.size(); ++k)
      if (!is_plain_token(f[k]))
        throw ParseError(row.line, "empty or invalid " + std::string(kTrialColumns[k]));
    if (!seen.insert(f[0]).second)
      throw ParseError(row.line, "duplicate trial_id '" + std::string(f[0]) + "'");
    auto order = parse_order(f[4]);
    if (!order) throw ParseError(row.line, "unknown order '" + std::string(f[4]) + "'");
    auto lang = parse_language(f[7]);
    if (!lang) throw ParseError(row.line, "unknown language '" + std::string(f[7]) + "'");
    Trial t{std::string(f[0]), std::string(f[1]), std::string(f[2]),
            std::string(f[3]), *order,            std::string(f[5]),
            std::string(f[6]), *lang,             std::string(f[8]),
            std::string(f[9]), correct_position(*order)};
    try {
      validate_trial(t);
    } catch (const ValidationError& e) {
      throw ParseError(row.line, e.what());
    }
    trials.push_back(std::move(t));
  }
  return trials;
}

inline std::string write_trial_manifest(std::span<const Trial> trials) {
  std::string out = csv_header(kTrialColumns);
  for (const Trial& t : trials) {
    out += t.trial_id + ',' + t.target_id + ',' + t.other_id + ',' + t.probe_id + ',';
    out += to_string(t.order);
    out += ',' + t.contrast + ',' + t.context + ',';
    out += to_string(t.language);
    out += ',' + t.ref_speaker + ',' + t.probe_speaker + '\n';
  }
  return out;
}

/// Lookup by trial_id. Pointers refer into `trials`, which must outlive
/// the index.
inline std::unordered_map<std::string, const Trial*> index_trials(
    std::span<const Trial> trials) {
  std::unordered_map<std::string, const Trial*> index;
  index.reserve(trials.size());
  for (const Trial& t : trials)
    if (!index.emplace(t.trial_id, &t).second)
      throw ValidationError("duplicate trial_id '" + t.trial_id + "'");
  return index;
}

}  // namespace abxkit
