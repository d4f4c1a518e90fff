// abxkit/lists.hpp

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

// Counterbalancing trials into participant lists.
//
// Constraints on a valid assignment of N trials with list size L and R
// repetitions:
//   * ceil(N R / L) lists; every list has L trials except at most one,
//     which holds the remaining N R mod L;
//   * every trial appears in exactly R lists;
//   * no list holds two trials of the same contrast;
//   * within a list, trials whose correct answer is first and those whose
//     correct answer is second differ in count by at most one.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "abxkit/error.hpp"
#include "abxkit/random.hpp"
#include "abxkit/text.hpp"
#include "abxkit/trial.hpp"

namespace abxkit {

struct ExperimentList {
  std::string list_id;
  std::vector<std::string> trial_ids;  // presentation order
  std::vector<std::string> participants;
};

class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& message)
      : Error(ErrorKind::infeasible, message) {}
};

struct CounterbalanceOptions {
  std::size_t list_size = 190;
  std::size_t repetitions = 3;
  std::uint64_t seed = 0;
  std::size_t step_budget = 1'000'000;
};

/// Expected list lengths for N trials: all `list_size`, except a final
/// shorter list when N * R is not a multiple of L.
inline std::vector<std::size_t> expected_list_lengths(std::size_t num_trials,
                                                      std::size_t list_size,
                                                      std::size_t repetitions) {
  std::size_t total = num_trials * repetitions;
  std::vector<std::size_t> out(total / list_size, list_size);
  if (total % list_size) out.push_back(total % list_size);
  return out;
}

inline std::string list_id_for(std::size_t index, std::size_t count) {
  std::string digits = std::to_string(index + 1);
  std::size_t width = std::max<std::size_t>(3, std::to_string(count).size());
  return "L" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

/// Seeded greedy assignment with chronological backtracking. Copies of the
/// most-repeated contrasts are placed first; each copy tries the lists with
/// the most room for its answer position first, ties broken by seed.
/// Throws InfeasibleError naming the binding constraint.
inline std::vector<ExperimentList> counterbalance(std::span<const Trial> trials,
                                                  const CounterbalanceOptions& options) {
  const std::size_t n = trials.size(), L = options.list_size, R = options.repetitions;
  if (n == 0) throw ValidationError("no trials to counterbalance");
  if (L == 0 || R == 0) throw ValidationError("list size and repetitions must be positive");
  index_trials(trials);  // rejects duplicate IDs

  const std::vector<std::size_t> capacity = expected_list_lengths(n, L, R);
  const std::size_t m = capacity.size();

  std::map<std::string, std::vector<std::size_t>> by_contrast;
  for (std::size_t i = 0; i < n; ++i) by_contrast[contrast_key(trials[i])].push_back(i);
  for (const auto& [key, members] : by_contrast)
    if (members.size() * R > m)
      throw InfeasibleError("contrast '" + key + "' needs " +
                            std::to_string(members.size() * R) +
                            " distinct lists (no repeats within a list) but only " +
                            std::to_string(m) + " lists exist");

  // Per-list ceiling for each answer position (balance within +-1).
  std::vector<std::size_t> half(m);
  std::size_t room_first = 0, need_first = 0, need_second = 0;
  for (std::size_t b = 0; b < m; ++b) {
    half[b] = (capacity[b] + 1) / 2;
    room_first += half[b];
  }
  for (const Trial& t : trials) (t.correct_position == Position::first ? need_first : need_second) += R;
  if (need_first > room_first || need_second > room_first)
    throw InfeasibleError("answer positions unbalanced: " + std::to_string(need_first) +
                          " first vs " + std::to_string(need_second) +
                          " second copies cannot be split within +-1 per list");

  Rng rng = make_rng(options.seed, 0);
  std::vector<std::pair<std::string, std::vector<std::size_t>>> groups(by_contrast.begin(),
                                                                       by_contrast.end());
  shuffle(groups, rng);
  std::stable_sort(groups.begin(), groups.end(), [](const auto& x, const auto& y) {
    return x.second.size() > y.second.size();
  });
  std::vector<std::size_t> copies;  // trial index per copy
  std::vector<std::size_t> copy_contrast;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<std::size_t> members = groups[g].second;
    shuffle(members, rng);
    for (std::size_t r = 0; r < R; ++r)
      for (std::size_t t : members) {
        copies.push_back(t);
        copy_contrast.push_back(g);
      }
  }
  std::vector<std::uint64_t> list_key(m);
  for (auto& k : list_key) k = rng();

  std::vector<std::size_t> used(m, 0), firsts(m, 0), seconds(m, 0);
  std::vector<std::vector<char>> has_contrast(groups.size(), std::vector<char>(m, 0));
  std::vector<std::vector<std::size_t>> assigned(m);

  struct Frame {
    std::vector<std::size_t> candidates;
    std::size_t next = 0;
    std::size_t chosen = 0;
  };
  std::vector<Frame> stack;
  stack.reserve(copies.size());
  std::size_t steps = 0;

  auto candidates_for = [&](std::size_t c) {
    const bool first = trials[copies[c]].correct_position == Position::first;
    const std::size_t g = copy_contrast[c];
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < m; ++b) {
      if (used[b] >= capacity[b] || has_contrast[g][b]) continue;
      if ((first ? firsts[b] : seconds[b]) >= half[b]) continue;
      out.push_back(b);
    }
    std::sort(out.begin(), out.end(), [&](std::size_t x, std::size_t y) {
      std::size_t rx = half[x] - (first ? firsts[x] : seconds[x]);
      std::size_t ry = half[y] - (first ? firsts[y] : seconds[y]);
      if (rx != ry) return rx > ry;
      std::size_t fx = capacity[x] - used[x], fy = capacity[y] - used[y];
      if (fx != fy) return fx > fy;
      return list_key[x] < list_key[y];
    });
    return out;
  };
  auto place = [&](std::size_t c, std::size_t b, bool add) {
    const bool first = trials[copies[c]].correct_position == Position::first;
    std::size_t delta = add ? 1 : static_cast<std::size_t>(-1);
    used[b] += delta;
    (first ? firsts[b] : seconds[b]) += delta;
    has_contrast[copy_contrast[c]][b] = add;
    if (add) assigned[b].push_back(copies[c]);
    else assigned[b].pop_back();
  };

  std::size_t c = 0;
  stack.push_back({candidates_for(0)});
  while (c < copies.size()) {
    Frame& f = stack.back();
    if (f.next < f.candidates.size()) {
      if (++steps > options.step_budget)
        throw InfeasibleError("search budget of " + std::to_string(options.step_budget) +
                              " steps exhausted at copy " + std::to_string(c) + " of " +
                              std::to_string(copies.size()) + " (contrast '" +
                              groups[copy_contrast[c]].first + "')");
      f.chosen = f.candidates[f.next++];
      place(c, f.chosen, true);
      ++c;
      if (c < copies.size()) stack.push_back({candidates_for(c)});
    } else {
      stack.pop_back();
      if (stack.empty())
        throw InfeasibleError("no assignment satisfies the contrast and balance constraints");
      --c;
      place(c, stack.back().chosen, false);
    }
  }

  std::vector<ExperimentList> lists(m);
  Rng order_rng = make_rng(options.seed, 1);
  for (std::size_t b = 0; b < m; ++b) {
    lists[b].list_id = list_id_for(b, m);
    shuffle(assigned[b], order_rng);
    for (std::size_t t : assigned[b]) lists[b].trial_ids.push_back(trials[t].trial_id);
  }
  return lists;
}

/// Round-robin: participant k goes to list k mod (number of lists).
inline void assign_participants(std::vector<ExperimentList>& lists,
                                std::span<const std::string> participants) {
  if (lists.empty()) return;
  for (std::size_t k = 0; k < participants.size(); ++k)
    lists[k % lists.size()].participants.push_back(participants[k]);
}

struct ListViolation {
  enum class Kind { length, contrast_repeat, repetition, order_balance, unknown_trial, list_count };
  Kind kind;
  std::string list_id;  // empty for whole-assignment violations
  std::string detail;
};

inline std::string_view to_string(ListViolation::Kind k) {
  switch (k) {
    case ListViolation::Kind::length: return "length";
    case ListViolation::Kind::contrast_repeat: return "contrast_repeat";
    case ListViolation::Kind::repetition: return "repetition";
    case ListViolation::Kind::order_balance: return "order_balance";
    case ListViolation::Kind::unknown_trial: return "unknown_trial";
    case ListViolation::Kind::list_count: return "list_count";
  }
  return "?";
}

/// Every violation of the constraints above; empty means valid.
inline std::vector<ListViolation> check_lists(std::span<const ExperimentList> lists,
                                              std::span<const Trial> trials,
                                              std::size_t list_size, std::size_t repetitions) {
  using Kind = ListViolation::Kind;
  std::vector<ListViolation> out;
  auto index = index_trials(trials);
  auto expected = expected_list_lengths(trials.size(), list_size, repetitions);

  if (lists.size() != expected.size())
    out.push_back({Kind::list_count, "",
                   std::to_string(lists.size()) + " lists, expected " +
                       std::to_string(expected.size())});
  const std::size_t remainder = (trials.size() * repetitions) % list_size;
  bool short_seen = false;
  for (const auto& list : lists) {
    std::size_t len = list.trial_ids.size();
    bool ok = len == list_size || (remainder && len == remainder && !short_seen);
    if (len != list_size && ok) short_seen = true;
    if (!ok)
      out.push_back({Kind::length, list.list_id,
                     "length " + std::to_string(len) + ", expected " + std::to_string(list_size)});
  }

  std::map<std::string, std::size_t> appearances;
  for (const auto& list : lists) {
    std::map<std::string, std::size_t> contrasts;
    std::size_t firsts = 0, seconds = 0;
    for (const auto& id : list.trial_ids) {
      auto it = index.find(id);
      if (it == index.end()) {
        out.push_back({Kind::unknown_trial, list.list_id, "unknown trial '" + id + "'"});
        continue;
      }
      ++appearances[id];
      ++contrasts[contrast_key(*it->second)];
      (it->second->correct_position == Position::first ? firsts : seconds) += 1;
    }
    for (const auto& [key, count] : contrasts)
      if (count > 1)
        out.push_back({Kind::contrast_repeat, list.list_id,
                       "contrast '" + key + "' appears " + std::to_string(count) + " times"});
    std::size_t gap = firsts > seconds ? firsts - seconds : seconds - firsts;
    if (gap > 1)
      out.push_back({Kind::order_balance, list.list_id,
                     std::to_string(firsts) + " first vs " + std::to_string(seconds) +
                         " second"});
  }
  for (const Trial& t : trials) {
    std::size_t count = appearances.count(t.trial_id) ? appearances[t.trial_id] : 0;
    if (count != repetitions)
      out.push_back({Kind::repetition, "",
                     "trial '" + t.trial_id + "' appears " + std::to_string(count) +
                         " times, expected " + std::to_string(repetitions)});
  }
  return out;
}

inline constexpr std::array<std::string_view, 3> kListColumns = {"list_id", "position",
                                                                 "trial_id"};

inline std::string write_lists(std::span<const ExperimentList> lists) {
  std::string out = csv_header(kListColumns);
  for (const auto& list : lists)
    for (std::size_t p = 0; p < list.trial_ids.size(); ++p)
      out += list.list_id + ',' + std::to_string(p + 1) + ',' + list.trial_ids[p] + '\n';
  return out;
}

/// Rows may come in any order; positions within a list must be 1..len.
inline std::vector<ExperimentList> read_lists(std::string_view content) {
  std::map<std::string, std::map<std::int64_t, std::string>> by_list;
  for (const CsvRow& row : read_csv(content, kListColumns)) {
    if (!is_plain_token(row.fields[0]) || !is_plain_token(row.fields[2]))
      throw ParseError(row.line, "empty or invalid identifier");
    auto pos = parse_int(row.fields[1]);
    if (!pos || *pos < 1) throw ParseError(row.line, "position must be an integer >= 1");
    if (!by_list[std::string(row.fields[0])].emplace(*pos, row.fields[2]).second)
      throw ParseError(row.line, "duplicate position " + std::to_string(*pos));
  }
  std::vector<ExperimentList> out;
  for (auto& [id, positions] : by_list) {
    ExperimentList list{id, {}, {}};
    std::int64_t expect = 1;
    for (auto& [pos, trial] : positions) {
      if (pos != expect++)
        throw ParseError(0, "list '" + id + "' has a gap before position " + std::to_string(pos));
      list.trial_ids.push_back(std::move(trial));
    }
    out.push_back(std::move(list));
  }
  return out;
}

}  // namespace abxkit
