// tools/smoke.hpp

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

// End-to-end pipeline over a fixture directory:
//   alignment.csv, wav/<utterance_id>.wav, lists.csv, fixture.txt,
//   responses_correct.csv, responses_inverted.csv, responses_noisy.csv
// Stages go through the command runner, so the check covers the CLI too.

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "abxkit/abxkit.hpp"

namespace abxkit::cli {

struct SmokeCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SmokeReport {
  std::vector<SmokeCheck> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return !checks.empty();
  }

  std::string first_failure() const {
    for (const auto& c : checks)
      if (!c.passed) return c.name + " (" + c.detail + ")";
    return {};
  }

  std::string render() const {
    std::string out;
    for (const auto& c : checks)
      out += std::string(c.passed ? "PASS " : "FAIL ") + c.name + ": " + c.detail + '\n';
    return out;
  }
};

using CommandRunner = std::function<int(const std::vector<std::string>&)>;

namespace smoke_detail {

namespace fs = std::filesystem;

inline std::map<std::string, std::string> read_key_values(const fs::path& p) {
  std::map<std::string, std::string> kv;
  const std::string content = read_file(p);
  for (const Line& line : split_lines(content)) {
    std::string_view t = trim_cr(line.text);
    if (t.empty() || t.front() == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(line.number, "expected key=value", p.string());
    kv.emplace(std::string(t.substr(0, eq)), std::string(t.substr(eq + 1)));
  }
  return kv;
}

inline double overall_accuracy(const fs::path& p) {
  static constexpr std::array<std::string_view, 7> cols = {
      "level", "language", "contrast", "stimulus", "n", "accuracy", "percent"};
  std::string content = read_file(p);
  for (const CsvRow& row : read_csv(content, cols))
    if (row.fields[0] == "overall") {
      auto v = parse_real(row.fields[5]);
      if (!v) throw ParseError(row.line, "bad accuracy", p.string());
      return *v;
    }
  throw ValidationError(p.string() + ": no overall row");
}

inline std::string num(double v) { return format_real(v); }

}  // namespace smoke_detail

/// Runs every stage; a stage exiting non-zero aborts with a
/// ValidationError naming it. Property checks are collected in the report.
inline SmokeReport smoke_pipeline(const std::filesystem::path& fixture,
                                  const std::filesystem::path& work, const CommandRunner& run) {
  namespace fs = std::filesystem;
  using smoke_detail::num;
  fs::create_directories(work);
  auto F = [&](const std::string& name) { return (fixture / name).string(); };
  auto W = [&](const std::string& name) { return (work / name).string(); };
  auto stage = [&](const std::string& name, std::vector<std::string> argv) {
    int rc = run(argv);
    if (rc != 0)
      throw ValidationError("smoke stage '" + name + "' exited with status " + std::to_string(rc));
  };

  auto config = smoke_detail::read_key_values(fixture / "fixture.txt");
  for (const char* key : {"list_size", "repetitions", "seed"})
    if (!config.count(key)) throw ValidationError("fixture.txt lacks '" + std::string(key) + "'");

  stage("mine", {"mine", "--alignment", F("alignment.csv"), "--out", W("sets.csv")});
  stage("make-items", {"make-items", "--sets", W("sets.csv"), "--out", W("trials.csv")});
  stage("assemble", {"assemble", "--sets", W("sets.csv"), "--trials", W("trials.csv"),
                     "--wav-dir", F("wav"), "--out-dir", W("audio")});
  stage("extract-mfcc", {"extract-mfcc", "--wav-dir", W("audio/stimuli"), "--out-dir", W("mfcc")});
  stage("score", {"score", "--features", W("mfcc"), "--trials", W("trials.csv"), "--gamma",
                  "cosine", "--out", W("scores_mfcc.csv")});

  // Oracle model: the probe takes the target's own representation.
  std::vector<Trial> trials = read_trial_manifest(read_file(W("trials.csv")));
  {
    std::vector<DiscriminabilityRecord> oracle;
    for (const auto& t : trials) {
      auto target = load_feature_file(fs::path(W("mfcc")) / (t.target_id + ".feat"));
      auto other = load_feature_file(fs::path(W("mfcc")) / (t.other_id + ".feat"));
      oracle.push_back(make_record(t.trial_id,
                                   dtw_distance(target, target, Divergence::angular_cosine),
                                   dtw_distance(other, target, Divergence::angular_cosine)));
    }
    std::ofstream(W("scores_oracle.csv"), std::ios::binary) << write_records(oracle);
  }

  stage("accuracy", {"accuracy", "--trials", W("trials.csv"), "--records",
                     W("scores_oracle.csv"), "--out", W("accuracy_oracle.csv")});
  stage("accuracy", {"accuracy", "--trials", W("trials.csv"), "--records",
                     W("scores_mfcc.csv"), "--out", W("accuracy_mfcc.csv")});
  stage("accuracy", {"accuracy", "--trials", W("trials.csv"), "--responses",
                     F("responses_correct.csv"), "--out", W("accuracy_correct.csv")});
  stage("accuracy", {"accuracy", "--trials", W("trials.csv"), "--responses",
                     F("responses_inverted.csv"), "--out", W("accuracy_inverted.csv")});
  stage("check-lists", {"check-lists", "--lists", F("lists.csv"), "--trials", W("trials.csv"),
                        "--list-size", config["list_size"], "--repetitions",
                        config["repetitions"]});
  stage("fit", {"fit", "--trials", W("trials.csv"), "--records", W("scores_mfcc.csv"),
                "--responses", F("responses_correct.csv"), "--out", W("fit_correct.txt")});
  stage("compare", {"compare", "--models",
                    "mfcc=" + W("scores_mfcc.csv") + ",oracle=" + W("scores_oracle.csv"),
                    "--trials", W("trials.csv"), "--responses", F("responses_noisy.csv"),
                    "--resamples", "20", "--seed", config["seed"], "--out", W("compare.csv")});

  SmokeReport report;
  auto check = [&](std::string name, bool ok, std::string detail) {
    report.checks.push_back({std::move(name), ok, std::move(detail)});
  };
  check("trials", !trials.empty() && trials.size() % 4 == 0,
        std::to_string(trials.size()) + " trials");

  double oracle = smoke_detail::overall_accuracy(W("accuracy_oracle.csv"));
  check("oracle_model_accuracy", oracle == 1.0, "overall " + num(oracle));
  double mfcc = smoke_detail::overall_accuracy(W("accuracy_mfcc.csv"));
  check("mfcc_model_accuracy", std::isfinite(mfcc) && mfcc >= 0.0 && mfcc <= 1.0,
        "overall " + num(mfcc));
  double correct = smoke_detail::overall_accuracy(W("accuracy_correct.csv"));
  check("human_accuracy_correct_responders", correct == 1.0, "overall " + num(correct));
  double inverted = smoke_detail::overall_accuracy(W("accuracy_inverted.csv"));
  check("human_accuracy_inverted_responders", inverted == 0.0, "overall " + num(inverted));

  auto fit = smoke_detail::read_key_values(W("fit_correct.txt"));
  bool finite = true;
  for (const auto& [k, v] : fit)
    if (k == "log_likelihood" || k.rfind("coef.", 0) == 0 || k.rfind("se.", 0) == 0)
      finite = finite && parse_real(v).has_value();
  check("fit_separation_flagged", fit["separation_flag"] == "true",
        "separation_flag=" + fit["separation_flag"]);
  check("fit_finite", finite, "log_likelihood=" + fit["log_likelihood"]);

  static constexpr std::array<std::string_view, 8> cmp_cols = {
      "row_model", "column_model", "mean_diff", "ci_lo", "ci_hi", "significant", "resamples",
      "failures"};
  std::string cmp = read_file(W("compare.csv"));
  auto rows = read_csv(cmp, cmp_cols);
  bool cmp_ok = rows.size() == 4;
  for (const auto& r : rows)
    for (std::size_t k = 2; k <= 4; ++k) cmp_ok = cmp_ok && parse_real(r.fields[k]).has_value();
  check("compare_finite", cmp_ok, std::to_string(rows.size()) + " cells");
  return report;
}

}  // namespace abxkit::cli
