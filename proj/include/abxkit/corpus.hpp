// abxkit/corpus.hpp

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

// From phone alignments to ABX items: three-phone windows, matched
// stimulus sets, the four item orders, and trial audio assembly.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "abxkit/error.hpp"
#include "abxkit/text.hpp"
#include "abxkit/trial.hpp"
#include "abxkit/wav.hpp"

namespace abxkit {

struct AlignmentEntry {
  std::string utterance_id;
  std::string speaker_id;
  std::string phone;
  double start = 0.0;  // seconds
  double end = 0.0;
};

inline constexpr std::array<std::string_view, 5> kAlignmentColumns = {
    "utterance_id", "speaker_id", "phone", "start", "end"};

/// Phone labels end up inside contrast ("a:b") and context ("l_r")
/// labels, so ':' is not allowed in them.
inline bool is_valid_phone(std::string_view p) {
  return is_plain_token(p) && p.find(':') == std::string_view::npos;
}

/// Parses and validates an alignment table. Output is grouped by
/// utterance (lexicographic) and time-ordered within each utterance.
inline std::vector<AlignmentEntry> parse_alignment(std::string_view content) {
  struct Located {
    AlignmentEntry entry;
    std::size_t line;
  };
  std::map<std::string, std::vector<Located>> by_utt;
  for (const CsvRow& row : read_csv(content, kAlignmentColumns)) {
    const auto& f = row.fields;
    if (!is_plain_token(f[0]) || !is_plain_token(f[1]))
      throw ParseError(row.line, "empty or invalid utterance/speaker id");
    if (!is_valid_phone(f[2])) throw ParseError(row.line, "invalid phone label '" + std::string(f[2]) + "'");
    auto start = parse_real(f[3]), end = parse_real(f[4]);
    if (!start || !end) throw ParseError(row.line, "start/end must be finite reals");
    if (*start < 0.0) throw ParseError(row.line, "negative start time");
    if (!(*start < *end)) throw ParseError(row.line, "start >= end");
    auto& group = by_utt[std::string(f[0])];
    if (!group.empty() && group.front().entry.speaker_id != f[1])
      throw ParseError(row.line, "utterance '" + std::string(f[0]) +
                                     "' changes speaker (first seen on line " +
                                     std::to_string(group.front().line) + ")");
    group.push_back({{std::string(f[0]), std::string(f[1]), std::string(f[2]), *start, *end},
                     row.line});
  }
  std::vector<AlignmentEntry> out;
  for (auto& [utt, group] : by_utt) {
    std::stable_sort(group.begin(), group.end(), [](const Located& a, const Located& b) {
      return a.entry.start < b.entry.start;
    });
    for (std::size_t i = 1; i < group.size(); ++i)
      if (group[i].entry.start < group[i - 1].entry.end)
        throw ParseError(group[i].line, "overlaps line " + std::to_string(group[i - 1].line) +
                                            " in utterance '" + utt + "'");
    for (auto& g : group) out.push_back(std::move(g.entry));
  }
  return out;
}

/// Three consecutive phones of one utterance.
struct Segment {
  std::string id;  // "<utterance_id>-<index of first phone>"
  std::string utterance_id;
  std::string speaker_id;
  std::array<std::string, 3> phones;
  double start = 0.0;
  double end = 0.0;

  std::string context() const { return phones[0] + "_" + phones[2]; }
  const std::string& centre() const { return phones[1]; }
};

/// Every three-phone window, in alignment order.
inline std::vector<Segment> three_phone_windows(std::span<const AlignmentEntry> entries) {
  std::vector<Segment> out;
  std::size_t begin = 0;
  while (begin < entries.size()) {
    std::size_t end = begin;
    while (end < entries.size() && entries[end].utterance_id == entries[begin].utterance_id)
      ++end;
    for (std::size_t i = begin; i + 2 < end; ++i) {
      Segment s;
      s.utterance_id = entries[i].utterance_id;
      s.speaker_id = entries[i].speaker_id;
      s.id = s.utterance_id + "-" + std::to_string(i - begin);
      s.phones = {entries[i].phone, entries[i + 1].phone, entries[i + 2].phone};
      s.start = entries[i].start;
      s.end = entries[i + 2].end;
      out.push_back(std::move(s));
    }
    begin = end;
  }
  return out;
}

/// References a and b share a speaker and flanking phones but differ in
/// the centre phone (a's centre sorts first). The probes xa and xb are
/// tokens of a's and b's phone strings from one other speaker.
struct StimulusSet {
  std::string id;
  Language language = Language::native;
  Segment a, b, xa, xb;

  std::string contrast() const { return a.centre() + ":" + b.centre(); }
  std::string context() const { return a.context(); }
  const std::string& ref_speaker() const { return a.speaker_id; }
  const std::string& probe_speaker() const { return xa.speaker_id; }
};

inline std::string make_set_id(const Segment& a, const Segment& b, const Segment& xa,
                               const Segment& xb) {
  return a.id + "+" + b.id + "+" + xa.id + "+" + xb.id;
}

/// Throws ValidationError if `s` breaks a stimulus-set invariant.
inline void validate_set(const StimulusSet& s) {
  auto fail = [&](const std::string& what) {
    throw ValidationError("stimulus set '" + s.id + "': " + what);
  };
  if (s.a.speaker_id != s.b.speaker_id) fail("references from different speakers");
  if (s.xa.speaker_id != s.xb.speaker_id) fail("probes from different speakers");
  if (s.xa.speaker_id == s.a.speaker_id) fail("probe speaker equals reference speaker");
  if (s.a.phones[0] != s.b.phones[0] || s.a.phones[2] != s.b.phones[2])
    fail("references differ outside the centre phone");
  if (!(s.a.centre() < s.b.centre())) fail("centre phones not distinct and ordered");
  if (s.xa.phones != s.a.phones) fail("xa does not match a's phones");
  if (s.xb.phones != s.b.phones) fail("xb does not match b's phones");
}

struct MiningFilter {
  std::set<std::string> allowed_centres;    // empty = all phones
  std::set<std::string> excluded_contexts;  // "l_r" labels
  Language language = Language::native;
};

/// Exhaustive stimulus-set mining over three-phone windows. Output is
/// sorted by contrast, context, reference speaker, probe speaker, then
/// segment IDs.
inline std::vector<StimulusSet> mine_stimulus_sets(std::span<const AlignmentEntry> entries,
                                                   const MiningFilter& filter = {}) {
  std::vector<Segment> windows = three_phone_windows(entries);
  // context -> speaker -> centre -> segments
  std::map<std::string, std::map<std::string, std::map<std::string, std::vector<const Segment*>>>>
      index;
  for (const Segment& s : windows) {
    if (filter.excluded_contexts.count(s.context())) continue;
    if (!filter.allowed_centres.empty() && !filter.allowed_centres.count(s.centre())) continue;
    index[s.context()][s.speaker_id][s.centre()].push_back(&s);
  }

  std::vector<StimulusSet> out;
  for (const auto& [context, speakers] : index)
    for (const auto& [ref, centres] : speakers)
      for (auto ca = centres.begin(); ca != centres.end(); ++ca)
        for (auto cb = std::next(ca); cb != centres.end(); ++cb)
          for (const auto& [probe, probe_centres] : speakers) {
            if (probe == ref) continue;
            auto pa = probe_centres.find(ca->first), pb = probe_centres.find(cb->first);
            if (pa == probe_centres.end() || pb == probe_centres.end()) continue;
            for (const Segment* a : ca->second)
              for (const Segment* b : cb->second)
                for (const Segment* xa : pa->second)
                  for (const Segment* xb : pb->second) {
                    StimulusSet s{make_set_id(*a, *b, *xa, *xb), filter.language,
                                  *a, *b, *xa, *xb};
                    out.push_back(std::move(s));
                  }
          }
  std::sort(out.begin(), out.end(), [](const StimulusSet& x, const StimulusSet& y) {
    return std::make_tuple(x.contrast(), x.context(), x.ref_speaker(), x.probe_speaker(),
                           x.a.id, x.b.id, x.xa.id, x.xb.id) <
           std::make_tuple(y.contrast(), y.context(), y.ref_speaker(), y.probe_speaker(),
                           y.a.id, y.b.id, y.xa.id, y.xb.id);
  });
  return out;
}

/// The four items of a set, in the order AB_A, BA_B, AB_B, BA_A.
inline std::vector<Trial> make_items(const StimulusSet& s) {
  validate_set(s);
  std::vector<Trial> out;
  for (ItemOrder order : kAllOrders) {
    bool on_a = probe_matches_a(order);
    Trial t;
    t.trial_id = s.id + "+" + std::string(to_string(order));
    t.target_id = on_a ? s.a.id : s.b.id;
    t.other_id = on_a ? s.b.id : s.a.id;
    t.probe_id = on_a ? s.xa.id : s.xb.id;
    t.order = order;
    t.contrast = s.contrast();
    t.context = s.context();
    t.language = s.language;
    t.ref_speaker = s.ref_speaker();
    t.probe_speaker = s.probe_speaker();
    t.correct_position = correct_position(order);
    out.push_back(std::move(t));
  }
  return out;
}

inline constexpr std::array<std::string_view, 11> kSetColumns = {
    "set_id",       "language",   "contrast", "context", "role", "stimulus_id",
    "utterance_id", "speaker_id", "phones",   "start",   "end"};

/// Long format: four rows per set, roles a, b, xa, xb.
inline std::string write_sets(std::span<const StimulusSet> sets) {
  std::string out = csv_header(kSetColumns);
  for (const auto& s : sets) {
    const std::pair<const char*, const Segment*> roles[] = {
        {"a", &s.a}, {"b", &s.b}, {"xa", &s.xa}, {"xb", &s.xb}};
    for (const auto& [role, seg] : roles)
      out += s.id + ',' + std::string(to_string(s.language)) + ',' + s.contrast() + ',' +
             s.context() + ',' + role + ',' + seg->id + ',' + seg->utterance_id + ',' +
             seg->speaker_id + ',' + seg->phones[0] + ' ' + seg->phones[1] + ' ' +
             seg->phones[2] + ',' + format_real(seg->start) + ',' + format_real(seg->end) + '\n';
  }
  return out;
}

inline std::vector<StimulusSet> read_sets(std::string_view content) {
  std::vector<StimulusSet> out;
  std::map<std::string, std::size_t> where;
  std::map<std::string, std::set<std::string>> roles_seen;
  for (const CsvRow& row : read_csv(content, kSetColumns)) {
    const auto& f = row.fields;
    std::string set_id(f[0]);
    auto lang = parse_language(f[1]);
    if (!lang) throw ParseError(row.line, "unknown language '" + std::string(f[1]) + "'");
    auto phones = split_fields(f[8]);
    if (phones.size() != 3) throw ParseError(row.line, "phones must hold three labels");
    auto start = parse_real(f[9]), end = parse_real(f[10]);
    if (!start || !end || !(*start < *end)) throw ParseError(row.line, "bad start/end");
    Segment seg{std::string(f[5]), std::string(f[6]), std::string(f[7]),
                {std::string(phones[0]), std::string(phones[1]), std::string(phones[2])},
                *start, *end};
    auto [it, fresh] = where.emplace(set_id, out.size());
    if (fresh) {
      out.emplace_back();
      out.back().id = set_id;
      out.back().language = *lang;
    }
    StimulusSet& s = out[it->second];
    if (!roles_seen[set_id].insert(std::string(f[4])).second)
      throw ParseError(row.line, "duplicate role '" + std::string(f[4]) + "'");
    if (f[4] == "a") s.a = std::move(seg);
    else if (f[4] == "b") s.b = std::move(seg);
    else if (f[4] == "xa") s.xa = std::move(seg);
    else if (f[4] == "xb") s.xb = std::move(seg);
    else throw ParseError(row.line, "unknown role '" + std::string(f[4]) + "'");
  }
  for (const auto& s : out) {
    if (roles_seen[s.id].size() != 4)
      throw ValidationError("stimulus set '" + s.id + "' lacks one of the roles a, b, xa, xb");
    validate_set(s);
  }
  return out;
}

/// Samples [round(start * rate), round(end * rate)) of `w`.
inline Waveform cut_segment(const Waveform& w, double start, double end) {
  auto first = static_cast<long long>(std::llround(start * w.sample_rate));
  auto last = static_cast<long long>(std::llround(end * w.sample_rate));
  if (first < 0 || last <= first || static_cast<std::size_t>(last) > w.samples.size())
    throw DomainError("segment [" + format_real(start) + ", " + format_real(end) +
                      ") s outside a " + format_real(w.duration()) + " s recording");
  return {std::vector<double>(w.samples.begin() + first, w.samples.begin() + last),
          w.sample_rate};
}

inline constexpr double kFirstGapSeconds = 0.500;   // between the two references
inline constexpr double kSecondGapSeconds = 0.650;  // between second reference and probe

/// first + 500 ms silence + second + 650 ms silence + probe.
inline Waveform assemble_trial_audio(const Waveform& first, const Waveform& second,
                                     const Waveform& probe) {
  if (first.sample_rate != second.sample_rate || first.sample_rate != probe.sample_rate)
    throw DomainError("sample-rate mismatch: " + std::to_string(first.sample_rate) + ", " +
                      std::to_string(second.sample_rate) + ", " +
                      std::to_string(probe.sample_rate) + " Hz");
  const int rate = first.sample_rate;
  auto gap1 = static_cast<std::size_t>(std::llround(kFirstGapSeconds * rate));
  auto gap2 = static_cast<std::size_t>(std::llround(kSecondGapSeconds * rate));
  Waveform out;
  out.sample_rate = rate;
  out.samples.reserve(first.samples.size() + second.samples.size() + probe.samples.size() +
                      gap1 + gap2);
  out.samples.insert(out.samples.end(), first.samples.begin(), first.samples.end());
  out.samples.insert(out.samples.end(), gap1, 0.0);
  out.samples.insert(out.samples.end(), second.samples.begin(), second.samples.end());
  out.samples.insert(out.samples.end(), gap2, 0.0);
  out.samples.insert(out.samples.end(), probe.samples.begin(), probe.samples.end());
  return out;
}

}  // namespace abxkit
