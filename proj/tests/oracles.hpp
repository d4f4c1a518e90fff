// tests/oracles.hpp

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

// Independent reference computations used only by the test suites. None
// of these call into the implementation paths they are used to check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

using Frames = std::vector<std::vector<double>>;

// Symmetrized KL written term by term as 0.5 [sum x log(x/y) + sum y log(y/x)].
inline double kl(const std::vector<double>& x, const std::vector<double>& y) {
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    a += x[i] * std::log(x[i] / y[i]);
    b += y[i] * std::log(y[i] / x[i]);
  }
  return 0.5 * (a + b);
}

inline double cosine(const std::vector<double>& x, const std::vector<double>& y) {
  double dot = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * y[i];
    xx += x[i] * x[i];
    yy += y[i] * y[i];
  }
  double c = dot / (std::sqrt(xx) * std::sqrt(yy));
  c = std::max(-1.0, std::min(1.0, c));
  return std::acos(c) / std::numbers::pi;
}

/// Minimum over every monotone alignment path, found by explicit
/// enumeration of paths (not dynamic programming), divided by max(p, q).
inline double brute_force_dtw(const Frames& c, const Frames& d,
                              const std::function<double(const std::vector<double>&,
                                                         const std::vector<double>&)>& gamma) {
  const std::size_t p = c.size(), q = d.size();
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j,
                                                                   double acc) {
    acc += gamma(c[i], d[j]);
    if (i == p - 1 && j == q - 1) {
      best = std::min(best, acc);
      return;
    }
    if (i + 1 < p) walk(i + 1, j, acc);
    if (j + 1 < q) walk(i, j + 1, acc);
    if (i + 1 < p && j + 1 < q) walk(i + 1, j + 1, acc);
  };
  walk(0, 0, 0.0);
  return best / static_cast<double>(std::max(p, q));
}

/// Number of monotone paths (Delannoy number D(p-1, q-1)).
inline std::uint64_t count_paths(std::size_t p, std::size_t q) {
  std::vector<std::vector<std::uint64_t>> n(p, std::vector<std::uint64_t>(q, 0));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j) {
      if (i == 0 || j == 0) { n[i][j] = 1; continue; }
      n[i][j] = n[i - 1][j] + n[i][j - 1] + n[i - 1][j - 1];
    }
  return n[p - 1][q - 1];
}

/// Magnitude of bins 0..n/2 of the DFT of `x` zero-padded to n, by the
/// O(n^2) definition.
inline std::vector<double> dft_magnitude(const std::vector<double>& x, std::size_t n) {
  std::vector<double> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t)
      acc += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * t) /
                                        static_cast<double>(n));
    out[k] = std::abs(acc);
  }
  return out;
}

/// Triangular mel filter responses of one magnitude spectrum, computed
/// per filter from first principles.
inline std::vector<double> mel_filter_energies(const std::vector<double>& magnitude,
                                               double sample_rate, std::size_t n_fft,
                                               int filters, double low_hz, double high_hz,
                                               std::vector<double>* centres_hz = nullptr) {
  auto mel = [](double f) { return 1127.0 * std::log(1.0 + f / 700.0); };
  auto hz = [](double m) { return 700.0 * (std::exp(m / 1127.0) - 1.0); };
  double lo = mel(low_hz), hi = mel(high_hz), step = (hi - lo) / (filters + 1);
  std::vector<double> out(static_cast<std::size_t>(filters), 0.0);
  if (centres_hz) centres_hz->clear();
  for (int m = 0; m < filters; ++m) {
    double l = lo + m * step, c = l + step, r = c + step;
    if (centres_hz) centres_hz->push_back(hz(c));
    for (std::size_t k = 0; k < magnitude.size(); ++k) {
      double f = mel(sample_rate * static_cast<double>(k) / static_cast<double>(n_fft));
      double w = 0.0;
      if (f > l && f <= c) w = (f - l) / (c - l);
      else if (f > c && f < r) w = (r - f) / (r - c);
      out[static_cast<std::size_t>(m)] += w * magnitude[k];
    }
  }
  return out;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Probit log-likelihood for (intercept, slope) on a single predictor.
inline double probit_ll(const std::vector<double>& x, const std::vector<int>& y, double a,
                        double b) {
  double ll = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double p = normal_cdf(a + b * x[i]);
    ll += y[i] ? std::log(p) : std::log(1.0 - p);
  }
  return ll;
}

struct GridMax {
  double ll, a, b;
};

/// Exhaustive grid over [a_lo, a_hi] x [b_lo, b_hi] with `n` points per axis.
inline GridMax grid_search(const std::vector<double>& x, const std::vector<int>& y, double a_lo,
                           double a_hi, double b_lo, double b_hi, int n) {
  GridMax best{-std::numeric_limits<double>::infinity(), 0, 0};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double a = a_lo + (a_hi - a_lo) * i / (n - 1);
      double b = b_lo + (b_hi - b_lo) * j / (n - 1);
      double ll = probit_ll(x, y, a, b);
      if (ll > best.ll) best = {ll, a, b};
    }
  return best;
}

struct Phone {
  std::string utt, speaker, phone;
};

/// Stimulus sets as 4-tuples of window keys "<utt>-<i>", enumerated by
/// checking every quadruple of three-phone windows against the set
/// definition.
inline std::set<std::tuple<std::string, std::string, std::string, std::string>> brute_force_sets(
    const std::vector<std::vector<Phone>>& utterances) {
  struct Win {
    std::string key, speaker;
    std::vector<std::string> phones;
  };
  std::vector<Win> w;
  for (const auto& u : utterances)
    for (std::size_t i = 0; i + 2 < u.size(); ++i)
      w.push_back({u[i].utt + "-" + std::to_string(i), u[i].speaker,
                   {u[i].phone, u[i + 1].phone, u[i + 2].phone}});
  std::set<std::tuple<std::string, std::string, std::string, std::string>> out;
  for (const auto& a : w)
    for (const auto& b : w)
      for (const auto& xa : w)
        for (const auto& xb : w) {
          bool ok = a.speaker == b.speaker && xa.speaker == xb.speaker &&
                    a.speaker != xa.speaker && a.phones[0] == b.phones[0] &&
                    a.phones[2] == b.phones[2] && a.phones[1] < b.phones[1] &&
                    xa.phones == a.phones && xb.phones == b.phones;
          if (ok) out.insert({a.key, b.key, xa.key, xb.key});
        }
  return out;
}

}  // namespace oracle
