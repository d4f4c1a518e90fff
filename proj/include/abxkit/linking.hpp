// abxkit/linking.hpp

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

// Linking model discriminability to human responses: design assembly,
// balanced subsampling, and resampled log-likelihood model comparison.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "abxkit/abx.hpp"
#include "abxkit/error.hpp"
#include "abxkit/parallel.hpp"
#include "abxkit/probit.hpp"
#include "abxkit/random.hpp"
#include "abxkit/responses.hpp"
#include "abxkit/text.hpp"
#include "abxkit/trial.hpp"

namespace abxkit {

struct DesignMatrix {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;                   // 1 = correct, 0 = incorrect
  std::vector<std::string> columns;
  std::vector<std::size_t> rows;       // index into the response list, per design row
  std::vector<std::string> warnings;
};

/// Columns: intercept, standardized delta, correct_second (1 when the
/// correct answer was presented second), list_position scaled to [0, 1],
/// then one dummy per participant except the lexicographically smallest.
/// Non-intercept columns that come out constant are dropped with a
/// warning. Catch responses are skipped. `subset`, when given, selects
/// which responses (by index) enter the design.
inline DesignMatrix build_design(std::span<const HumanResponse> responses,
                                 std::span<const DiscriminabilityRecord> records,
                                 std::span<const Trial> trials,
                                 std::optional<std::span<const std::size_t>> subset = {}) {
  auto trial_index = index_trials(trials);
  std::unordered_map<std::string_view, const DiscriminabilityRecord*> record_index;
  for (const auto& r : records) record_index[r.trial_id] = &r;

  DesignMatrix d;
  std::vector<double> delta, second, position;
  std::vector<std::string_view> participant;
  auto take = [&](std::size_t i) {
    const HumanResponse& r = responses[i];
    if (r.is_catch) return;
    auto t = trial_index.find(r.trial_id);
    if (t == trial_index.end())
      throw ValidationError("response references unknown trial '" + r.trial_id + "'");
    auto rec = record_index.find(r.trial_id);
    if (rec == record_index.end())
      throw ValidationError("no discriminability record for trial '" + r.trial_id + "'");
    d.rows.push_back(i);
    delta.push_back(rec->second->delta);
    second.push_back(t->second->correct_position == Position::second ? 1.0 : 0.0);
    position.push_back(static_cast<double>(r.trial_index));
    participant.push_back(r.participant_id);
  };
  if (subset)
    for (std::size_t i : *subset) take(i);
  else
    for (std::size_t i = 0; i < responses.size(); ++i) take(i);

  const std::size_t n = d.rows.size();
  if (n == 0) throw ValidationError("no non-catch responses to build a design from");

  auto standardize = [&](std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    double sd = std::sqrt(ss / static_cast<double>(v.size()));
    for (double& x : v) x = sd > 0.0 ? (x - mean) / sd : 0.0;
  };
  standardize(delta);
  auto [lo, hi] = std::minmax_element(position.begin(), position.end());
  double pmin = *lo, pspan = *hi - *lo;
  for (double& p : position) p = pspan > 0.0 ? (p - pmin) / pspan : 0.0;

  std::set<std::string_view> ids(participant.begin(), participant.end());
  std::vector<std::string_view> dummies(std::next(ids.begin()), ids.end());
  if (ids.size() == 1)
    d.warnings.push_back("single participant: no participant columns");

  std::vector<std::pair<std::string, std::vector<double>>> candidates;
  candidates.push_back({"delta", std::move(delta)});
  candidates.push_back({"correct_second", std::move(second)});
  candidates.push_back({"list_position", std::move(position)});
  for (std::string_view id : dummies) {
    std::vector<double> col(n);
    for (std::size_t r = 0; r < n; ++r) col[r] = participant[r] == id ? 1.0 : 0.0;
    candidates.push_back({"participant[" + std::string(id) + "]", std::move(col)});
  }

  std::vector<const std::pair<std::string, std::vector<double>>*> kept;
  for (const auto& c : candidates) {
    bool constant = std::all_of(c.second.begin(), c.second.end(),
                                [&](double v) { return v == c.second.front(); });
    if (constant)
      d.warnings.push_back("dropped constant column '" + c.first + "'");
    else
      kept.push_back(&c);
  }

  d.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(kept.size() + 1));
  d.y.resize(static_cast<Eigen::Index>(n));
  d.columns.push_back("intercept");
  for (const auto* c : kept) d.columns.push_back(c->first);
  for (std::size_t r = 0; r < n; ++r) {
    auto row = static_cast<Eigen::Index>(r);
    d.x(row, 0) = 1.0;
    for (std::size_t j = 0; j < kept.size(); ++j)
      d.x(row, static_cast<Eigen::Index>(j + 1)) = kept[j]->second[r];
    d.y[row] = responses[d.rows[r]].correct ? 1.0 : 0.0;
  }
  return d;
}

inline ProbitFit fit_design(const DesignMatrix& d, const ProbitOptions& options = {}) {
  ProbitOptions o = options;
  o.intercept_column = 0;
  return fit_probit(d.x, d.y, o, d.columns);
}

/// Non-catch response indices grouped by stimulus (trial_id).
inline std::map<std::string, std::vector<std::size_t>> group_by_stimulus(
    std::span<const HumanResponse> responses) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < responses.size(); ++i)
    if (!responses[i].is_catch) groups[responses[i].trial_id].push_back(i);
  return groups;
}

struct Subsample {
  std::vector<std::size_t> rows;       // grouped by stimulus key, ascending within a group
  std::vector<std::string> skipped;    // stimuli with fewer than k responses
  std::size_t included_stimuli = 0;
};

/// Draws k distinct responses per stimulus without replacement.
inline Subsample balanced_subsample(const std::map<std::string, std::vector<std::size_t>>& groups,
                                    std::size_t k, Rng& rng) {
  Subsample out;
  for (const auto& [stimulus, rows] : groups) {
    if (rows.size() < k) {
      out.skipped.push_back(stimulus);
      continue;
    }
    std::vector<std::size_t> pool = rows;
    // Partial Fisher-Yates: the first k slots end up a uniform k-subset.
    for (std::size_t i = 0; i < k; ++i)
      std::swap(pool[i], pool[i + uniform_below(rng, pool.size() - i)]);
    std::sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    out.rows.insert(out.rows.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    ++out.included_stimuli;
  }
  return out;
}

struct ModelScores {
  std::string name;
  std::vector<DiscriminabilityRecord> records;
};

struct ComparisonCell {
  std::string row;
  std::string column;
  double mean = 0.0;  // mean over resamples of LL(column) - LL(row)
  double lo = 0.0;    // 2.5th percentile
  double hi = 0.0;    // 97.5th percentile
  bool significant = false;
  std::size_t resamples_used = 0;
  std::size_t failures = 0;
};

struct ComparisonOptions {
  std::size_t resamples = 1000;
  std::uint64_t seed = 0;
  std::size_t per_stimulus = 3;
  bool refit = true;  // false: fit once on all data, evaluate on each subsample
  std::size_t threads = 1;
  ProbitOptions probit;
};

struct ComparisonResult {
  std::vector<std::string> models;                   // best (highest mean LL) first
  std::vector<double> mean_log_likelihood;           // aligned with models
  std::vector<std::size_t> fit_failures;             // aligned with models
  std::vector<std::vector<ComparisonCell>> cells;    // cells[row][column]
  // [model][resample], aligned with models; NaN where the fit failed.
  std::vector<std::vector<double>> resample_log_likelihood;
  std::size_t subsample_size = 0;
  std::vector<std::string> warnings;
};

/// Type-7 (linear interpolation) quantile of sorted data.
inline double sorted_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) return 0.0;
  double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  auto lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Resampled log-likelihood comparison. Resample r draws its subsample
/// from stream r of the seed, so results do not depend on thread count.
inline ComparisonResult compare_models(std::span<const ModelScores> models,
                                       std::span<const HumanResponse> responses,
                                       std::span<const Trial> trials,
                                       const ComparisonOptions& options) {
  const std::size_t m = models.size();
  if (m == 0) throw ValidationError("no models to compare");
  if (options.resamples == 0) throw ValidationError("resamples must be positive");
  {
    std::set<std::string_view> names;
    for (const auto& model : models)
      if (!names.insert(model.name).second)
        throw ValidationError("duplicate model name '" + model.name + "'");
  }
  auto groups = group_by_stimulus(responses);

  // Fixed mode: one fit per model on all responses.
  // Per-response log-likelihood contributions, indexed by response.
  std::vector<std::optional<std::vector<double>>> fixed_ll(m);
  if (!options.refit) {
    for (std::size_t i = 0; i < m; ++i) {
      DesignMatrix d = build_design(responses, models[i].records, trials);
      ProbitFit fit;
      try {
        fit = fit_design(d, options.probit);
      } catch (const FitError&) {
        continue;
      }
      if (!fit.converged) continue;
      Eigen::VectorXd row_ll = probit_row_log_likelihood(d.x, d.y, fit.coefficients);
      std::vector<double> by_response(responses.size(), 0.0);
      for (std::size_t k = 0; k < d.rows.size(); ++k)
        by_response[d.rows[k]] = row_ll[static_cast<Eigen::Index>(k)];
      fixed_ll[i] = std::move(by_response);
    }
  }
  // Validate every model up front so missing records fail loudly, not as
  // per-resample fit failures.
  if (options.refit)
    for (const auto& model : models) build_design(responses, model.records, trials);

  struct ResampleOutcome {
    std::vector<double> ll;    // per model
    std::vector<char> ok;      // per model
    std::size_t size = 0;
    std::vector<std::string> skipped;
  };
  std::vector<ResampleOutcome> outcomes(options.resamples);

  parallel_for(options.resamples, options.threads, [&](std::size_t r) {
    Rng rng = make_rng(options.seed, r);
    Subsample sub = balanced_subsample(groups, options.per_stimulus, rng);
    ResampleOutcome& out = outcomes[r];
    out.ll.assign(m, 0.0);
    out.ok.assign(m, 0);
    out.size = sub.rows.size();
    if (r == 0) out.skipped = sub.skipped;
    for (std::size_t i = 0; i < m; ++i) {
      try {
        if (options.refit) {
          DesignMatrix d = build_design(responses, models[i].records, trials,
                                        std::span<const std::size_t>(sub.rows));
          ProbitFit fit = fit_design(d, options.probit);
          if (!fit.converged) continue;
          out.ll[i] = fit.log_likelihood;
        } else {
          if (!fixed_ll[i]) continue;
          double ll = 0.0;
          for (std::size_t idx : sub.rows) ll += (*fixed_ll[i])[idx];
          out.ll[i] = ll;
        }
        out.ok[i] = 1;
      } catch (const Error&) {
        // Recorded as a failure for this model in this resample.
      }
    }
  });

  ComparisonResult result;
  result.subsample_size = outcomes.front().size;
  for (const auto& s : outcomes.front().skipped)
    result.warnings.push_back("stimulus '" + s + "' has fewer than " +
                              std::to_string(options.per_stimulus) + " responses; skipped");

  std::vector<double> mean_ll(m, 0.0);
  std::vector<std::size_t> failures(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t used = 0;
    for (const auto& o : outcomes) {
      if (o.ok[i]) {
        mean_ll[i] += o.ll[i];
        ++used;
      } else {
        ++failures[i];
      }
    }
    mean_ll[i] = used ? mean_ll[i] / static_cast<double>(used) : -HUGE_VAL;
  }

  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return mean_ll[a] > mean_ll[b]; });

  for (std::size_t i : order) {
    result.models.push_back(models[i].name);
    result.mean_log_likelihood.push_back(mean_ll[i]);
    result.fit_failures.push_back(failures[i]);
    std::vector<double> per(outcomes.size());
    for (std::size_t r = 0; r < outcomes.size(); ++r)
      per[r] = outcomes[r].ok[i] ? outcomes[r].ll[i] : std::numeric_limits<double>::quiet_NaN();
    result.resample_log_likelihood.push_back(std::move(per));
  }
  result.cells.assign(m, std::vector<ComparisonCell>(m));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      std::size_t row = order[a], col = order[b];
      ComparisonCell& cell = result.cells[a][b];
      cell.row = models[row].name;
      cell.column = models[col].name;
      std::vector<double> diffs;
      double sum = 0.0;
      for (const auto& o : outcomes) {
        if (!o.ok[row] || !o.ok[col]) {
          ++cell.failures;
          continue;
        }
        double diff = o.ll[col] - o.ll[row];
        diffs.push_back(diff);
        sum += diff;
      }
      cell.resamples_used = diffs.size();
      if (diffs.empty()) continue;
      cell.mean = sum / static_cast<double>(diffs.size());
      std::sort(diffs.begin(), diffs.end());
      cell.lo = sorted_quantile(diffs, 0.025);
      cell.hi = sorted_quantile(diffs, 0.975);
      cell.significant = cell.lo > 0.0 || cell.hi < 0.0;
    }
  return result;
}

/// Long-format table, one row per (row model, column model) cell.
inline std::string write_comparison(const ComparisonResult& result) {
  std::string out = "row_model,column_model,mean_diff,ci_lo,ci_hi,significant,resamples,failures\n";
  for (const auto& row : result.cells)
    for (const auto& c : row)
      out += c.row + ',' + c.column + ',' + format_real(c.mean) + ',' + format_real(c.lo) +
             ',' + format_real(c.hi) + ',' + (c.significant ? "1" : "0") + ',' +
             std::to_string(c.resamples_used) + ',' + std::to_string(c.failures) + '\n';
  return out;
}

/// Key-value summary of one fit.
inline std::string write_fit_summary(const ProbitFit& fit, std::span<const std::string> warnings) {
  std::string out;
  out += "log_likelihood=" + format_real(fit.log_likelihood) + '\n';
  out += "converged=" + std::string(fit.converged ? "true" : "false") + '\n';
  out += "iterations=" + std::to_string(fit.iterations) + '\n';
  out += "separation_flag=" + std::string(fit.separation_flag ? "true" : "false") + '\n';
  out += "gradient_max_norm=" + format_real(fit.gradient_norm) + '\n';
  for (std::size_t j = 0; j < fit.names.size(); ++j) {
    auto jj = static_cast<Eigen::Index>(j);
    out += "coef." + fit.names[j] + '=' + format_real(fit.coefficients[jj]) + '\n';
    out += "se." + fit.names[j] + '=' + format_real(fit.standard_errors[jj]) + '\n';
  }
  for (const auto& w : warnings) out += "warning=" + w + '\n';
  return out;
}

}  // namespace abxkit
