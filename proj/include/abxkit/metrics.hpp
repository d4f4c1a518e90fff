// abxkit/metrics.hpp

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

// Frame divergences and the length-normalized DTW distance
//
//   d(C, D) = min over alignments of sum gamma(c_i, d_j) / max(p, q)
//
// with steps (1,0), (0,1), (1,1), no band and no slope constraint.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "abxkit/error.hpp"
#include "abxkit/feature_io.hpp"

namespace abxkit {

enum class Divergence { symmetrized_kl, angular_cosine };

inline std::string_view to_string(Divergence d) {
  return d == Divergence::symmetrized_kl ? "kl" : "cosine";
}

inline std::optional<Divergence> parse_divergence(std::string_view s) {
  if (s == "kl" || s == "symmetrized_kl") return Divergence::symmetrized_kl;
  if (s == "cosine" || s == "angular_cosine") return Divergence::angular_cosine;
  return std::nullopt;
}

namespace detail {

inline void check_same_dim(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw DomainError("dimension mismatch: " + std::to_string(x.size()) + " vs " +
                      std::to_string(y.size()));
  if (x.empty()) throw DomainError("empty vector");
}

// Both the public gamma functions and the DTW inner loop go through these
// so that results agree bit for bit.
inline double kl_from_logs(std::span<const double> x, std::span<const double> log_x,
                           std::span<const double> y, std::span<const double> log_y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    sum += (x[i] - y[i]) * (log_x[i] - log_y[i]);
  return 0.5 * sum;
}

inline double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline void unit_vector(std::span<const double> x, double norm_x, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] / norm_x;
}

// arccos(u . v) / pi for unit vectors, evaluated as 2 atan2(|u - v|, |u + v|).
// Same value as the clamped arccos, but without its loss of accuracy near
// colinear and anti-colinear pairs.
inline double angle_between_units(std::span<const double> u, std::span<const double> v) {
  double diff = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    diff += (u[i] - v[i]) * (u[i] - v[i]);
    sum += (u[i] + v[i]) * (u[i] + v[i]);
  }
  return 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum)) / std::numbers::pi;
}

}  // namespace detail

/// Symmetrized Kullback-Leibler divergence, 0.5 [KL(x||y) + KL(y||x)].
/// Inputs must already be floored: every entry strictly positive.
inline double gamma_kl(std::span<const double> x, std::span<const double> y) {
  detail::check_same_dim(x, y);
  std::vector<double> log_x(x.size()), log_y(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw DomainError("non-finite input to gamma_kl");
    if (x[i] <= 0.0 || y[i] <= 0.0)
      throw DomainError("gamma_kl needs strictly positive entries (floor zeros first)");
    log_x[i] = std::log(x[i]);
    log_y[i] = std::log(y[i]);
  }
  return detail::kl_from_logs(x, log_x, y, log_y);
}

/// Angle between x and y as a fraction of pi, in [0, 1].
inline double gamma_cos(std::span<const double> x, std::span<const double> y) {
  detail::check_same_dim(x, y);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw DomainError("non-finite input to gamma_cos");
  double nx = detail::norm(x), ny = detail::norm(y);
  if (nx == 0.0 || ny == 0.0) throw DomainError("gamma_cos of a zero vector");
  std::vector<double> u(x.size()), v(y.size());
  detail::unit_vector(x, nx, u);
  detail::unit_vector(y, ny, v);
  return detail::angle_between_units(u, v);
}

inline double frame_divergence(Divergence kind, std::span<const double> x,
                               std::span<const double> y) {
  return kind == Divergence::symmetrized_kl ? gamma_kl(x, y) : gamma_cos(x, y);
}

/// Minimal cumulative cost over monotone alignments of a p x q grid,
/// divided by max(p, q). `cost(i, j)` is called exactly once per cell in
/// row-major order; the accumulator is long double.
template <class CostFn>
double dtw_normalized(std::size_t p, std::size_t q, CostFn&& cost) {
  if (p == 0 || q == 0) throw DomainError("dtw of an empty sequence");
  std::vector<long double> prev(q), curr(q);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      long double c = static_cast<long double>(cost(i, j));
      long double best;
      if (i == 0 && j == 0) best = 0.0L;
      else if (i == 0) best = curr[j - 1];
      else if (j == 0) best = prev[j];
      else best = std::min({prev[j], curr[j - 1], prev[j - 1]});
      curr[j] = best + c;
    }
    std::swap(prev, curr);
  }
  return static_cast<double>(prev[q - 1] / static_cast<long double>(std::max(p, q)));
}

// One matched pair of 0-based frame indices.
using AlignedPair = std::pair<std::size_t, std::size_t>;

struct DtwResult {
  double distance;                  // normalized by max(p, q)
  std::vector<AlignedPair> path;    // from (0,0) to (p-1,q-1)
};

namespace detail {

// Per-frame precomputation for one sequence: elementwise logs (kl) or
// unit-normalized frames (cosine). Same layout as the sequence values.
struct PreparedSequence {
  const FeatureSequence* seq;
  std::vector<double> aux;
};

inline PreparedSequence prepare(const FeatureSequence& s, Divergence kind) {
  PreparedSequence out{&s, {}};
  if (kind == Divergence::symmetrized_kl) {
    if (s.mode() != FeatureMode::probability)
      throw DomainError("symmetrized KL needs probability-mode features ('" +
                        s.stimulus_id() + "')");
    out.aux.resize(s.values().size());
    for (std::size_t k = 0; k < s.values().size(); ++k) {
      double v = s.values()[k];
      if (v <= 0.0)
        throw DomainError("unfloored zero in '" + s.stimulus_id() + "'");
      out.aux[k] = std::log(v);
    }
  } else {
    out.aux.resize(s.values().size());
    const std::size_t d = s.dim();
    for (std::size_t t = 0; t < s.num_frames(); ++t) {
      double n = norm(s.frame(t));
      if (n == 0.0)
        throw DomainError("frame " + std::to_string(t) + " of '" + s.stimulus_id() +
                          "' is all-zero (cosine undefined)");
      unit_vector(s.frame(t), n, std::span<double>(out.aux).subspan(t * d, d));
    }
  }
  return out;
}

inline auto make_cost(const PreparedSequence& a, const PreparedSequence& b,
                      Divergence kind) {
  return [&a, &b, kind](std::size_t i, std::size_t j) {
    const std::size_t d = a.seq->dim();
    auto ax = std::span<const double>(a.aux).subspan(i * d, d);
    auto by = std::span<const double>(b.aux).subspan(j * d, d);
    if (kind == Divergence::symmetrized_kl)
      return kl_from_logs(a.seq->frame(i), ax, b.seq->frame(j), by);
    return angle_between_units(ax, by);
  };
}

inline void check_compatible(const FeatureSequence& c, const FeatureSequence& d) {
  if (c.dim() != d.dim())
    throw DomainError("dimension mismatch between '" + c.stimulus_id() + "' (" +
                      std::to_string(c.dim()) + ") and '" + d.stimulus_id() + "' (" +
                      std::to_string(d.dim()) + ")");
}

}  // namespace detail

inline double dtw_distance(const FeatureSequence& c, const FeatureSequence& d,
                           Divergence kind) {
  detail::check_compatible(c, d);
  auto pc = detail::prepare(c, kind);
  auto pd = detail::prepare(d, kind);
  return dtw_normalized(c.num_frames(), d.num_frames(), detail::make_cost(pc, pd, kind));
}

/// As dtw_distance, but also recovers one optimal alignment. Ties prefer
/// the diagonal, then the step that advances i.
inline DtwResult dtw_align(const FeatureSequence& c, const FeatureSequence& d,
                           Divergence kind) {
  detail::check_compatible(c, d);
  auto pc = detail::prepare(c, kind);
  auto pd = detail::prepare(d, kind);
  auto cost = detail::make_cost(pc, pd, kind);
  const std::size_t p = c.num_frames(), q = d.num_frames();
  std::vector<long double> acc(p * q);
  auto at = [&](std::size_t i, std::size_t j) -> long double& { return acc[i * q + j]; };
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j) {
      long double best;
      if (i == 0 && j == 0) best = 0.0L;
      else if (i == 0) best = at(0, j - 1);
      else if (j == 0) best = at(i - 1, 0);
      else best = std::min({at(i - 1, j), at(i, j - 1), at(i - 1, j - 1)});
      at(i, j) = best + static_cast<long double>(cost(i, j));
    }

  DtwResult out;
  out.distance = static_cast<double>(at(p - 1, q - 1) / static_cast<long double>(std::max(p, q)));
  std::size_t i = p - 1, j = q - 1;
  out.path.push_back({i, j});
  while (i > 0 || j > 0) {
    if (i == 0) --j;
    else if (j == 0) --i;
    else {
      long double diag = at(i - 1, j - 1), up = at(i - 1, j), left = at(i, j - 1);
      if (diag <= up && diag <= left) { --i; --j; }
      else if (up <= left) --i;
      else --j;
    }
    out.path.push_back({i, j});
  }
  std::reverse(out.path.begin(), out.path.end());
  return out;
}

}  // namespace abxkit
