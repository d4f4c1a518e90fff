// abxkit/abx.hpp

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

// Discriminability scoring and accuracy aggregation.
//
// A model's discriminability on a trial is
//   delta = d(other, probe) - d(target, probe)
// and the trial counts as correct only when delta > 0 (ties are wrong).
// Accuracy is aggregated by stimulus (trial item), then by contrast, then
// over contrasts within each language.

#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "abxkit/error.hpp"
#include "abxkit/feature_io.hpp"
#include "abxkit/metrics.hpp"
#include "abxkit/parallel.hpp"
#include "abxkit/responses.hpp"
#include "abxkit/text.hpp"
#include "abxkit/trial.hpp"

namespace abxkit {

struct DiscriminabilityRecord {
  std::string trial_id;
  double d_target = 0.0;
  double d_other = 0.0;
  double delta = 0.0;
};

inline DiscriminabilityRecord make_record(std::string trial_id, double d_target,
                                          double d_other) {
  return {std::move(trial_id), d_target, d_other, d_other - d_target};
}

using FeatureMap = std::unordered_map<std::string, FeatureSequence>;

/// Distance between probe and each reference. Errors carry the trial ID.
inline DiscriminabilityRecord score_trial(const Trial& trial, const FeatureMap& features,
                                          Divergence kind) {
  auto lookup = [&](const std::string& id) -> const FeatureSequence& {
    auto it = features.find(id);
    if (it == features.end())
      throw ValidationError("trial '" + trial.trial_id + "': missing features for stimulus '" +
                            id + "'");
    return it->second;
  };
  const FeatureSequence& target = lookup(trial.target_id);
  const FeatureSequence& other = lookup(trial.other_id);
  const FeatureSequence& probe = lookup(trial.probe_id);
  try {
    return make_record(trial.trial_id, dtw_distance(target, probe, kind),
                       dtw_distance(other, probe, kind));
  } catch (const DomainError& e) {
    throw DomainError("trial '" + trial.trial_id + "': " + e.what());
  }
}

/// Scores every trial; record i belongs to trials[i] regardless of threads.
inline std::vector<DiscriminabilityRecord> score_trials(std::span<const Trial> trials,
                                                        const FeatureMap& features,
                                                        Divergence kind,
                                                        std::size_t threads = 1) {
  std::vector<DiscriminabilityRecord> out(trials.size());
  parallel_for(trials.size(), threads,
               [&](std::size_t i) { out[i] = score_trial(trials[i], features, kind); });
  return out;
}

inline constexpr std::array<std::string_view, 4> kRecordColumns = {"trial_id", "d_target",
                                                                   "d_other", "delta"};

inline std::string write_records(std::span<const DiscriminabilityRecord> records) {
  std::string out = csv_header(kRecordColumns);
  for (const auto& r : records)
    out += r.trial_id + ',' + format_real(r.d_target) + ',' + format_real(r.d_other) +
           ',' + format_real(r.delta) + '\n';
  return out;
}

inline std::vector<DiscriminabilityRecord> read_records(std::string_view content) {
  std::vector<DiscriminabilityRecord> out;
  for (const CsvRow& row : read_csv(content, kRecordColumns)) {
    if (!is_plain_token(row.fields[0])) throw ParseError(row.line, "invalid trial_id");
    std::array<double, 3> v{};
    for (std::size_t k = 0; k < 3; ++k) {
      auto x = parse_real(row.fields[k + 1]);
      if (!x) throw ParseError(row.line, "not a finite real: '" + std::string(row.fields[k + 1]) + "'");
      v[k] = *x;
    }
    if (v[0] < 0.0 || v[1] < 0.0) throw ParseError(row.line, "negative distance");
    if (v[2] != v[1] - v[0]) throw ParseError(row.line, "delta != d_other - d_target");
    out.push_back({std::string(row.fields[0]), v[0], v[1], v[2]});
  }
  return out;
}

struct StimulusAccuracy {
  std::string trial_id;
  Language language;
  std::string contrast;
  std::size_t n = 0;
  std::size_t n_correct = 0;
  double accuracy = 0.0;
};

struct ContrastAccuracy {
  Language language;
  std::string contrast;
  std::size_t n_stimuli = 0;
  double accuracy = 0.0;
};

struct LanguageAccuracy {
  Language language;
  std::size_t n_contrasts = 0;
  double accuracy = 0.0;
};

struct AccuracyReport {
  std::vector<StimulusAccuracy> stimuli;    // sorted by (language, contrast, trial_id)
  std::vector<ContrastAccuracy> contrasts;  // sorted by (language, contrast)
  std::vector<LanguageAccuracy> languages;  // native first
  double overall = 0.0;                     // mean over all contrasts
  std::size_t n_contrasts = 0;

  const LanguageAccuracy* language(Language lang) const {
    for (const auto& l : languages)
      if (l.language == lang) return &l;
    return nullptr;
  }
};

struct Observation {
  std::string_view trial_id;
  bool correct;
};

/// Three-level mean: stimulus, then contrast, then language. Every level
/// is reduced over sorted keys, so input order never changes the result.
inline AccuracyReport aggregate_accuracy(std::span<const Observation> observations,
                                         std::span<const Trial> trials) {
  auto index = index_trials(trials);
  // (language, contrast) -> trial_id -> (n, correct)
  std::map<std::pair<Language, std::string>,
           std::map<std::string, std::pair<std::size_t, std::size_t>>>
      tree;
  for (const auto& obs : observations) {
    auto it = index.find(std::string(obs.trial_id));
    if (it == index.end())
      throw ValidationError("no trial matches '" + std::string(obs.trial_id) + "'");
    const Trial& t = *it->second;
    auto& cell = tree[{t.language, t.contrast}][t.trial_id];
    ++cell.first;
    if (obs.correct) ++cell.second;
  }

  AccuracyReport report;
  std::map<Language, std::pair<double, std::size_t>> per_language;
  double all_sum = 0.0;
  for (const auto& [key, stimuli] : tree) {
    double contrast_sum = 0.0;
    for (const auto& [trial_id, counts] : stimuli) {
      double acc = static_cast<double>(counts.second) / static_cast<double>(counts.first);
      report.stimuli.push_back({trial_id, key.first, key.second, counts.first,
                                counts.second, acc});
      contrast_sum += acc;
    }
    double contrast_acc = contrast_sum / static_cast<double>(stimuli.size());
    report.contrasts.push_back({key.first, key.second, stimuli.size(), contrast_acc});
    auto& lang = per_language[key.first];
    lang.first += contrast_acc;
    ++lang.second;
    all_sum += contrast_acc;
  }
  for (const auto& [lang, sum_n] : per_language)
    report.languages.push_back(
        {lang, sum_n.second, sum_n.first / static_cast<double>(sum_n.second)});
  report.n_contrasts = report.contrasts.size();
  if (report.n_contrasts)
    report.overall = all_sum / static_cast<double>(report.n_contrasts);
  return report;
}

inline AccuracyReport model_accuracy(std::span<const DiscriminabilityRecord> records,
                                     std::span<const Trial> trials) {
  std::vector<Observation> obs;
  obs.reserve(records.size());
  std::map<std::string_view, int> seen;
  for (const auto& r : records) {
    if (seen[r.trial_id]++)
      throw ValidationError("more than one record for trial '" + r.trial_id + "'");
    obs.push_back({r.trial_id, r.delta > 0.0});
  }
  return aggregate_accuracy(obs, trials);
}

/// Catch responses are excluded; correctness is re-derived from the trial.
inline AccuracyReport human_accuracy(std::span<const HumanResponse> responses,
                                     std::span<const Trial> trials) {
  auto index = index_trials(trials);
  std::vector<Observation> obs;
  obs.reserve(responses.size());
  for (const auto& r : responses) {
    if (r.is_catch) continue;
    auto it = index.find(r.trial_id);
    if (it == index.end())
      throw ValidationError("response references unknown trial '" + r.trial_id + "'");
    obs.push_back({r.trial_id, r.choice == it->second->correct_position});
  }
  return aggregate_accuracy(obs, trials);
}

inline std::string write_accuracy_report(const AccuracyReport& report) {
  std::string out = "level,language,contrast,stimulus,n,accuracy,percent\n";
  auto row = [&](std::string_view level, std::string_view lang, std::string_view contrast,
                 std::string_view stimulus, std::size_t n, double acc) {
    out += std::string(level) + ',' + std::string(lang) + ',' + std::string(contrast) +
           ',' + std::string(stimulus) + ',' + std::to_string(n) + ',' + format_real(acc) +
           ',' + format_fixed(100.0 * acc, 1) + '\n';
  };
  for (const auto& s : report.stimuli)
    row("stimulus", to_string(s.language), s.contrast, s.trial_id, s.n, s.accuracy);
  for (const auto& c : report.contrasts)
    row("contrast", to_string(c.language), c.contrast, "", c.n_stimuli, c.accuracy);
  for (const auto& l : report.languages)
    row("language", to_string(l.language), "", "", l.n_contrasts, l.accuracy);
  row("overall", "", "", "", report.n_contrasts, report.overall);
  return out;
}

struct ScatterRow {
  Language language;
  std::string contrast;
  std::size_t n_stimuli = 0;
  double human_accuracy = 0.0;
  double mean_delta = 0.0;
  double z_human = 0.0;
  double z_delta = 0.0;
};

struct ScatterTable {
  std::vector<ScatterRow> rows;
  std::vector<std::string> skipped;  // "<language>/<contrast>: reason"
};

/// z-scores with the population standard deviation; a zero-variance
/// column maps to all zeros.
inline std::vector<double> z_scores(std::span<const double> values) {
  std::vector<double> z(values.size(), 0.0);
  if (values.empty()) return z;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  double sd = std::sqrt(ss / static_cast<double>(values.size()));
  if (sd == 0.0) return z;
  for (std::size_t i = 0; i < values.size(); ++i) z[i] = (values[i] - mean) / sd;
  return z;
}

/// Per-contrast human accuracy against mean model delta, each column
/// z-scored across contrasts within a language.
inline ScatterTable scatter_export(std::span<const DiscriminabilityRecord> records,
                                   std::span<const HumanResponse> responses,
                                   std::span<const Trial> trials) {
  AccuracyReport human = human_accuracy(responses, trials);
  auto index = index_trials(trials);

  // Mean delta by stimulus, then by contrast, mirroring the accuracy order.
  std::map<std::pair<Language, std::string>, std::map<std::string, double>> deltas;
  for (const auto& r : records) {
    auto it = index.find(r.trial_id);
    if (it == index.end())
      throw ValidationError("no trial matches '" + r.trial_id + "'");
    const Trial& t = *it->second;
    deltas[{t.language, t.contrast}][t.trial_id] = r.delta;
  }
  std::map<std::pair<Language, std::string>, const ContrastAccuracy*> human_by_key;
  for (const auto& c : human.contrasts) human_by_key[{c.language, c.contrast}] = &c;

  ScatterTable table;
  for (const auto& [key, per_stim] : deltas) {
    auto h = human_by_key.find(key);
    if (h == human_by_key.end()) {
      table.skipped.push_back(std::string(to_string(key.first)) + "/" + key.second +
                              ": model data but no human responses");
      continue;
    }
    double sum = 0.0;
    for (const auto& [id, d] : per_stim) sum += d;
    table.rows.push_back({key.first, key.second, per_stim.size(), h->second->accuracy,
                          sum / static_cast<double>(per_stim.size()), 0.0, 0.0});
  }
  for (const auto& [key, c] : human_by_key)
    if (!deltas.count(key))
      table.skipped.push_back(std::string(to_string(key.first)) + "/" + key.second +
                              ": human responses but no model data");

  for (Language lang : {Language::native, Language::other}) {
    std::vector<std::size_t> members;
    std::vector<double> hs, ds;
    for (std::size_t i = 0; i < table.rows.size(); ++i)
      if (table.rows[i].language == lang) {
        members.push_back(i);
        hs.push_back(table.rows[i].human_accuracy);
        ds.push_back(table.rows[i].mean_delta);
      }
    auto zh = z_scores(hs), zd = z_scores(ds);
    for (std::size_t k = 0; k < members.size(); ++k) {
      table.rows[members[k]].z_human = zh[k];
      table.rows[members[k]].z_delta = zd[k];
    }
  }
  return table;
}

inline std::string write_scatter(const ScatterTable& table) {
  std::string out =
      "language,contrast,n_stimuli,human_accuracy,mean_delta,z_human_accuracy,z_mean_delta\n";
  for (const auto& r : table.rows)
    out += std::string(to_string(r.language)) + ',' + r.contrast + ',' +
           std::to_string(r.n_stimuli) + ',' + format_real(r.human_accuracy) + ',' +
           format_real(r.mean_delta) + ',' + format_real(r.z_human) + ',' +
           format_real(r.z_delta) + '\n';
  return out;
}

}  // namespace abxkit
