// abxkit/responses.hpp

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

// Human response tables and participant screening.
//
// Responses arrive on a 6-point scale from "first for sure" (1) to
// "second for sure" (6); 1-3 binarize to first, 4-6 to second.

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "abxkit/error.hpp"
#include "abxkit/text.hpp"
#include "abxkit/trial.hpp"

namespace abxkit {

struct HumanResponse {
  std::string participant_id;
  std::string list_id;
  int trial_index = 1;  // 1-based position in the participant's list
  std::string trial_id;
  int scale = 1;
  bool is_catch = false;
  Position choice = Position::first;
  bool correct = false;
};

constexpr Position binarize(int scale) {
  return scale <= 3 ? Position::first : Position::second;
}

inline constexpr std::array<std::string_view, 6> kResponseColumns = {
    "participant_id", "list_id", "trial_index", "trial_id", "scale", "is_catch"};

inline std::vector<HumanResponse> ingest_responses(std::string_view content,
                                                   std::span<const Trial> trials) {
  auto index = index_trials(trials);
  std::set<std::pair<std::string_view, std::int64_t>> seen;
  std::vector<HumanResponse> out;
  for (const CsvRow& row : read_csv(content, kResponseColumns)) {
    const auto& f = row.fields;
    if (!is_plain_token(f[0]) || !is_plain_token(f[1]) || !is_plain_token(f[3]))
      throw ParseError(row.line, "empty or invalid identifier");
    auto position = parse_int(f[2]);
    if (!position || *position < 1)
      throw ParseError(row.line, "trial_index must be an integer >= 1");
    auto scale = parse_int(f[4]);
    if (!scale || *scale < 1 || *scale > 6)
      throw ParseError(row.line, "scale '" + std::string(f[4]) + "' outside 1..6");
    bool is_catch;
    if (f[5] == "1" || f[5] == "true") is_catch = true;
    else if (f[5] == "0" || f[5] == "false") is_catch = false;
    else throw ParseError(row.line, "is_catch must be 0/1/true/false");
    auto it = index.find(std::string(f[3]));
    if (it == index.end())
      throw ParseError(row.line, "unknown trial_id '" + std::string(f[3]) + "'");
    if (!seen.emplace(f[0], *position).second)
      throw ParseError(row.line, "duplicate response for participant '" +
                                     std::string(f[0]) + "' at trial_index " +
                                     std::to_string(*position));
    HumanResponse r;
    r.participant_id = f[0];
    r.list_id = f[1];
    r.trial_index = static_cast<int>(*position);
    r.trial_id = f[3];
    r.scale = static_cast<int>(*scale);
    r.is_catch = is_catch;
    r.choice = binarize(r.scale);
    r.correct = r.choice == it->second->correct_position;
    out.push_back(std::move(r));
  }
  return out;
}

/// Raw table, readable by ingest_responses.
inline std::string write_responses(std::span<const HumanResponse> responses) {
  std::string out = csv_header(kResponseColumns);
  for (const auto& r : responses)
    out += r.participant_id + ',' + r.list_id + ',' + std::to_string(r.trial_index) +
           ',' + r.trial_id + ',' + std::to_string(r.scale) + ',' +
           (r.is_catch ? "1" : "0") + '\n';
  return out;
}

/// Raw columns plus the derived binarized choice and correctness.
inline std::string write_ingested_responses(std::span<const HumanResponse> responses) {
  std::string out =
      "participant_id,list_id,trial_index,trial_id,scale,is_catch,choice,correct\n";
  for (const auto& r : responses) {
    out += r.participant_id + ',' + r.list_id + ',' + std::to_string(r.trial_index) +
           ',' + r.trial_id + ',' + std::to_string(r.scale) + ',' +
           (r.is_catch ? "1" : "0") + ',';
    out += to_string(r.choice);
    out += r.correct ? ",1\n" : ",0\n";
  }
  return out;
}

struct ScreeningCriteria {
  int catch_total = 12;
  int fail_threshold = 3;
  int expected_trials = 0;  // responses (catch included) a finisher gives
};

struct ParticipantVerdict {
  std::string participant_id;
  bool accepted = true;
  int answered = 0;
  int catch_answered = 0;
  int catch_failed = 0;  // wrong answers plus unanswered catch trials
  std::vector<std::string> reasons;
};

/// Rejects participants who fail at least `fail_threshold` catch trials or
/// answer fewer than `expected_trials` trials. Sorted by participant ID.
inline std::vector<ParticipantVerdict> validate_participants(
    std::span<const HumanResponse> responses, const ScreeningCriteria& criteria) {
  std::map<std::string, ParticipantVerdict> by_participant;
  for (const auto& r : responses) {
    auto& v = by_participant[r.participant_id];
    v.participant_id = r.participant_id;
    ++v.answered;
    if (r.is_catch) {
      ++v.catch_answered;
      if (!r.correct) ++v.catch_failed;
    }
  }
  std::vector<ParticipantVerdict> out;
  for (auto& [id, v] : by_participant) {
    if (v.catch_answered < criteria.catch_total)
      v.catch_failed += criteria.catch_total - v.catch_answered;
    if (v.catch_failed >= criteria.fail_threshold) {
      v.accepted = false;
      v.reasons.push_back("failed " + std::to_string(v.catch_failed) + " of " +
                          std::to_string(criteria.catch_total) + " catch trials");
    }
    if (v.answered < criteria.expected_trials) {
      v.accepted = false;
      v.reasons.push_back("answered " + std::to_string(v.answered) + " of " +
                          std::to_string(criteria.expected_trials) + " trials");
    }
    out.push_back(std::move(v));
  }
  return out;
}

inline std::string write_verdicts(std::span<const ParticipantVerdict> verdicts) {
  std::string out = "participant_id,status,answered,catch_answered,catch_failed,reasons\n";
  for (const auto& v : verdicts) {
    std::string reasons;
    for (std::size_t i = 0; i < v.reasons.size(); ++i) {
      if (i) reasons += "; ";
      reasons += v.reasons[i];
    }
    out += v.participant_id + ',' + (v.accepted ? "accept" : "reject") + ',' +
           std::to_string(v.answered) + ',' + std::to_string(v.catch_answered) + ',' +
           std::to_string(v.catch_failed) + ',' + reasons + '\n';
  }
  return out;
}

}  // namespace abxkit
