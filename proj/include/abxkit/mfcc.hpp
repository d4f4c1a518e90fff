// abxkit/mfcc.hpp

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

// Baseline cepstral features: 13 MFCCs every 10 ms over 25 ms windows,
// plus first and second derivatives (39 dims), then mean-variance
// normalization over a moving 3 s (300-frame) window.
//
// Per frame: pre-emphasis, Hamming window, zero-pad to a power of two,
// magnitude spectrum, triangular mel filters, log (energy floored),
// orthonormal DCT-II, truncation to the first num_ceps coefficients.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "abxkit/error.hpp"
#include "abxkit/feature_io.hpp"
#include "abxkit/wav.hpp"

namespace abxkit {

struct MfccConfig {
  int sample_rate = kFeatureSampleRate;
  double window_ms = 25.0;
  double hop_ms = 10.0;
  int num_ceps = 13;
  int num_filters = 23;
  double preemphasis = 0.97;
  double low_freq = 20.0;
  double high_freq = 0.0;  // <= 0 means Nyquist
  double energy_floor = 1e-10;

  std::size_t window_samples() const {
    return static_cast<std::size_t>(std::lround(sample_rate * window_ms / 1000.0));
  }
  std::size_t hop_samples() const {
    return static_cast<std::size_t>(std::lround(sample_rate * hop_ms / 1000.0));
  }
  std::size_t fft_size() const {
    std::size_t n = 1;
    while (n < window_samples()) n <<= 1;
    return n;
  }

  void validate() const {
    if (!(hop_ms > 0.0) || !(window_ms > hop_ms))
      throw DomainError("mfcc: need window > hop > 0");
    if (num_ceps < 1 || num_filters < 1 || num_ceps > num_filters)
      throw DomainError("mfcc: need 1 <= num_ceps <= num_filters");
    double nyquist = 0.5 * sample_rate;
    double high = high_freq > 0.0 ? high_freq : nyquist;
    if (!(low_freq >= 0.0) || !(high > low_freq) || high > nyquist)
      throw DomainError("mfcc: bad filterbank frequency range");
  }
};

inline double hz_to_mel(double hz) { return 1127.0 * std::log1p(hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * std::expm1(mel / 1127.0); }

/// Number of frames for `num_samples` samples: floor((n - window) / hop) + 1.
inline std::size_t num_frames(std::size_t num_samples, const MfccConfig& cfg) {
  if (num_samples < cfg.window_samples()) return 0;
  return (num_samples - cfg.window_samples()) / cfg.hop_samples() + 1;
}

/// In-place iterative radix-2 FFT; size must be a power of two.
inline void fft(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
    std::complex<double> wlen(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k], v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

/// Triangular filters equally spaced on the mel scale, applied to the
/// non-negative-frequency half of an fft_size spectrum.
class MelBank {
 public:
  explicit MelBank(const MfccConfig& cfg) {
    cfg.validate();
    const std::size_t n_fft = cfg.fft_size();
    const double high = cfg.high_freq > 0.0 ? cfg.high_freq : 0.5 * cfg.sample_rate;
    const double mel_low = hz_to_mel(cfg.low_freq), mel_high = hz_to_mel(high);
    const double step = (mel_high - mel_low) / (cfg.num_filters + 1);
    const double bin_hz = static_cast<double>(cfg.sample_rate) / static_cast<double>(n_fft);
    filters_.resize(static_cast<std::size_t>(cfg.num_filters));
    for (int m = 0; m < cfg.num_filters; ++m) {
      double left = mel_low + m * step, centre = left + step, right = centre + step;
      centres_hz_.push_back(mel_to_hz(centre));
      Filter& f = filters_[static_cast<std::size_t>(m)];
      for (std::size_t k = 0; k <= n_fft / 2; ++k) {
        double mel = hz_to_mel(bin_hz * static_cast<double>(k));
        double w = 0.0;
        if (mel > left && mel <= centre) w = (mel - left) / (centre - left);
        else if (mel > centre && mel < right) w = (right - mel) / (right - centre);
        if (w > 0.0) {
          if (f.weights.empty()) f.first_bin = k;
          f.weights.resize(k - f.first_bin + 1, 0.0);
          f.weights.back() = w;
        }
      }
    }
  }

  std::size_t size() const { return filters_.size(); }
  const std::vector<double>& centres_hz() const { return centres_hz_; }

  /// Filter outputs for a magnitude spectrum of fft_size / 2 + 1 bins.
  void apply(std::span<const double> magnitude, std::span<double> out) const {
    for (std::size_t m = 0; m < filters_.size(); ++m) {
      const Filter& f = filters_[m];
      double sum = 0.0;
      for (std::size_t k = 0; k < f.weights.size(); ++k)
        sum += f.weights[k] * magnitude[f.first_bin + k];
      out[m] = sum;
    }
  }

 private:
  struct Filter {
    std::size_t first_bin = 0;
    std::vector<double> weights;
  };
  std::vector<Filter> filters_;
  std::vector<double> centres_hz_;
};

namespace detail {

inline void check_waveform(const Waveform& w, const MfccConfig& cfg) {
  if (w.sample_rate != cfg.sample_rate)
    throw DomainError("mfcc: sample rate " + std::to_string(w.sample_rate) + " Hz, expected " +
                      std::to_string(cfg.sample_rate) + " (no resampling is done)");
  if (w.samples.size() < cfg.window_samples())
    throw DomainError("mfcc: input of " + std::to_string(w.samples.size()) +
                      " samples is shorter than one window (" +
                      std::to_string(cfg.window_samples()) + ")");
}

}  // namespace detail

/// Log mel filterbank energies, num_frames x num_filters, row-major.
inline std::vector<double> compute_log_fbank(const Waveform& w, const MfccConfig& cfg = {}) {
  cfg.validate();
  detail::check_waveform(w, cfg);
  const std::size_t win = cfg.window_samples(), hop = cfg.hop_samples(),
                    n_fft = cfg.fft_size(), frames = num_frames(w.samples.size(), cfg),
                    n_mel = static_cast<std::size_t>(cfg.num_filters);
  MelBank bank(cfg);
  std::vector<double> window(win);
  for (std::size_t i = 0; i < win; ++i)
    window[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                       static_cast<double>(win - 1));

  std::vector<double> out(frames * n_mel), frame(win), magnitude(n_fft / 2 + 1);
  std::vector<std::complex<double>> spectrum(n_fft);
  for (std::size_t t = 0; t < frames; ++t) {
    std::copy_n(w.samples.begin() + static_cast<std::ptrdiff_t>(t * hop), win, frame.begin());
    for (std::size_t i = win - 1; i > 0; --i) frame[i] -= cfg.preemphasis * frame[i - 1];
    frame[0] -= cfg.preemphasis * frame[0];
    std::fill(spectrum.begin(), spectrum.end(), std::complex<double>(0.0));
    for (std::size_t i = 0; i < win; ++i) spectrum[i] = frame[i] * window[i];
    fft(spectrum);
    for (std::size_t k = 0; k < magnitude.size(); ++k) magnitude[k] = std::abs(spectrum[k]);
    std::span<double> row(out.data() + t * n_mel, n_mel);
    bank.apply(magnitude, row);
    for (double& e : row) e = std::log(std::max(e, cfg.energy_floor));
  }
  return out;
}

/// MFCCs (dim num_ceps, coefficient 0 included) of a 16 kHz waveform.
inline FeatureSequence extract_mfcc(const Waveform& w, const MfccConfig& cfg = {},
                                    std::string stimulus_id = "stimulus") {
  std::vector<double> fbank = compute_log_fbank(w, cfg);
  const auto n_mel = static_cast<std::size_t>(cfg.num_filters);
  const auto n_ceps = static_cast<std::size_t>(cfg.num_ceps);
  const std::size_t frames = fbank.size() / n_mel;

  std::vector<double> basis(n_ceps * n_mel);
  for (std::size_t k = 0; k < n_ceps; ++k) {
    double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(n_mel));
    for (std::size_t m = 0; m < n_mel; ++m)
      basis[k * n_mel + m] =
          scale * std::cos(std::numbers::pi * static_cast<double>(k) *
                           (static_cast<double>(m) + 0.5) / static_cast<double>(n_mel));
  }
  std::vector<double> out(frames * n_ceps);
  for (std::size_t t = 0; t < frames; ++t)
    for (std::size_t k = 0; k < n_ceps; ++k) {
      double sum = 0.0;
      for (std::size_t m = 0; m < n_mel; ++m) sum += basis[k * n_mel + m] * fbank[t * n_mel + m];
      out[t * n_ceps + k] = sum;
    }
  return FeatureSequence(std::move(stimulus_id), n_ceps, std::move(out));
}

/// Regression derivative over +-`half` frames with edge replication:
///   d_t = sum_n n (c_{t+n} - c_{t-n}) / (2 sum_n n^2)
inline std::vector<double> regression_deltas(std::span<const double> values, std::size_t dim,
                                             std::size_t half = 2) {
  const std::size_t frames = values.size() / dim;
  double denom = 0.0;
  for (std::size_t n = 1; n <= half; ++n) denom += static_cast<double>(n * n);
  denom *= 2.0;
  std::vector<double> out(values.size(), 0.0);
  const auto last = static_cast<std::ptrdiff_t>(frames) - 1;
  for (std::size_t t = 0; t < frames; ++t)
    for (std::size_t k = 0; k < dim; ++k) {
      double sum = 0.0;
      for (std::size_t n = 1; n <= half; ++n) {
        auto ti = static_cast<std::ptrdiff_t>(t);
        auto nn = static_cast<std::ptrdiff_t>(n);
        auto fwd = static_cast<std::size_t>(std::min(ti + nn, last));
        auto back = static_cast<std::size_t>(std::max<std::ptrdiff_t>(ti - nn, 0));
        sum += static_cast<double>(n) * (values[fwd * dim + k] - values[back * dim + k]);
      }
      out[t * dim + k] = sum / denom;
    }
  return out;
}

/// Appends first and second derivatives to a 13-dim sequence -> 39 dims.
inline FeatureSequence add_deltas(const FeatureSequence& seq) {
  if (seq.dim() != 13)
    throw DomainError("add_deltas expects 13 coefficients, got " + std::to_string(seq.dim()));
  const std::size_t dim = seq.dim(), frames = seq.num_frames();
  std::vector<double> d1 = regression_deltas(seq.values(), dim);
  std::vector<double> d2 = regression_deltas(d1, dim);
  std::vector<double> out;
  out.reserve(frames * dim * 3);
  for (std::size_t t = 0; t < frames; ++t) {
    auto base = seq.frame(t);
    out.insert(out.end(), base.begin(), base.end());
    out.insert(out.end(), d1.begin() + static_cast<std::ptrdiff_t>(t * dim),
               d1.begin() + static_cast<std::ptrdiff_t>((t + 1) * dim));
    out.insert(out.end(), d2.begin() + static_cast<std::ptrdiff_t>(t * dim),
               d2.begin() + static_cast<std::ptrdiff_t>((t + 1) * dim));
  }
  return FeatureSequence(seq.stimulus_id(), dim * 3, std::move(out), seq.mode());
}

inline constexpr std::size_t kMvnWindowFrames = 300;
inline constexpr double kMvnSdFloor = 1e-10;

/// Normalizes each frame by the mean and standard deviation of the
/// centred `window`-frame span around it (frames t - w/2 .. t + w/2 - 1),
/// truncated at the sequence edges.
inline FeatureSequence moving_mvn(const FeatureSequence& seq,
                                  std::size_t window = kMvnWindowFrames) {
  if (window == 0) throw DomainError("moving_mvn: window must be positive");
  const std::size_t dim = seq.dim(), frames = seq.num_frames();
  const std::size_t before = window / 2, after = window - before;
  std::vector<double> out(frames * dim);
  for (std::size_t t = 0; t < frames; ++t) {
    std::size_t lo = t >= before ? t - before : 0;
    std::size_t hi = std::min(frames, t + after);
    auto count = static_cast<double>(hi - lo);
    for (std::size_t k = 0; k < dim; ++k) {
      // Shifting by the window's first value keeps constant spans exact.
      double shift = seq.frame(lo)[k], sum = 0.0;
      for (std::size_t u = lo; u < hi; ++u) sum += seq.frame(u)[k] - shift;
      double mean = shift + sum / count, ss = 0.0;
      for (std::size_t u = lo; u < hi; ++u) {
        double dev = seq.frame(u)[k] - mean;
        ss += dev * dev;
      }
      double sd = std::max(std::sqrt(ss / count), kMvnSdFloor);
      out[t * dim + k] = (seq.frame(t)[k] - mean) / sd;
    }
  }
  return FeatureSequence(seq.stimulus_id(), dim, std::move(out), seq.mode());
}

/// The baseline pipeline: extract_mfcc -> add_deltas -> moving_mvn.
inline FeatureSequence mfcc_pipeline(const Waveform& w, std::string stimulus_id,
                                     const MfccConfig& cfg = {}) {
  return moving_mvn(add_deltas(extract_mfcc(w, cfg, std::move(stimulus_id))));
}

}  // namespace abxkit
