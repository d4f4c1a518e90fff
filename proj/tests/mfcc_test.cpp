// tests/mfcc_test.cpp

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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "abxkit/mfcc.hpp"
#include "oracles.hpp"

using namespace abxkit;

namespace {

Waveform tone(double hz, std::size_t n, double amplitude = 0.5) {
  Waveform w;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    w.samples[i] = amplitude * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) /
                                        16000.0);
  return w;
}

Waveform noise(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Waveform w;
  w.samples.resize(n);
  for (auto& s : w.samples) s = u(rng);
  return w;
}

// Raw WAV bytes with an arbitrary fmt header.
std::string raw_wav(std::uint16_t format, std::uint16_t channels, std::uint16_t bits,
                    const std::vector<std::int16_t>& samples, std::uint32_t data_size_override = 0) {
  auto put32 = [](std::string& s, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) s += static_cast<char>((v >> (8 * i)) & 0xff);
  };
  auto put16 = [](std::string& s, std::uint16_t v) {
    s += static_cast<char>(v & 0xff);
    s += static_cast<char>(v >> 8);
  };
  std::string out = "RIFF";
  auto data = static_cast<std::uint32_t>(samples.size() * 2);
  put32(out, 36 + data);
  out += "WAVEfmt ";
  put32(out, 16);
  put16(out, format);
  put16(out, channels);
  put32(out, 16000);
  put32(out, 16000u * channels * bits / 8);
  put16(out, static_cast<std::uint16_t>(channels * bits / 8));
  put16(out, bits);
  out += "data";
  put32(out, data_size_override ? data_size_override : data);
  for (auto s : samples) put16(out, static_cast<std::uint16_t>(s));
  return out;
}

}  // namespace

TEST(Wav, MonoRoundTrip) {
  Waveform w = noise(1, 16000);
  for (auto& s : w.samples) s = std::round(s * 32768.0) / 32768.0;
  Waveform back = read_wav(write_wav(w, "provenance line"));
  EXPECT_EQ(back.samples.size(), 16000u);
  EXPECT_EQ(back.sample_rate, 16000);
  EXPECT_EQ(back.samples, w.samples);
}

TEST(Wav, ScalingRule) {
  auto w = read_wav(raw_wav(1, 1, 16, {-32768, 0, 16384, 32767}));
  EXPECT_EQ(w.samples[0], -1.0);
  EXPECT_EQ(w.samples[1], 0.0);
  EXPECT_EQ(w.samples[2], 0.5);
  EXPECT_EQ(w.samples[3], 32767.0 / 32768.0);
}

TEST(Wav, Errors) {
  EXPECT_THROW(read_wav(raw_wav(1, 2, 16, {0, 0})), WavError);
  EXPECT_THROW(read_wav(raw_wav(3, 1, 16, {0, 0})), WavError);
  EXPECT_THROW(read_wav(raw_wav(1, 1, 8, {0, 0})), WavError);
  EXPECT_THROW(read_wav(raw_wav(1, 1, 16, {0, 0}, 400)), WavError);
  EXPECT_THROW(read_wav("RIFF\0\0\0\0WAVX"), WavError);
  std::string cut = raw_wav(1, 1, 16, {1, 2, 3});
  EXPECT_THROW(read_wav(cut.substr(0, 30)), WavError);
}

TEST(Mfcc, OneSecondGivesNinetyEightFrames) {
  auto seq = extract_mfcc(noise(2, 16000));
  EXPECT_EQ(seq.num_frames(), 98u);
  EXPECT_EQ(seq.dim(), 13u);
}

TEST(Mfcc, FrameCountFormulaOverRandomLengths) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> len(400, 6000);
  for (int i = 0; i < 100; ++i) {
    std::size_t n = i < 5 ? 400 + static_cast<std::size_t>(i) * 80 : len(rng);
    EXPECT_EQ(extract_mfcc(noise(static_cast<std::uint64_t>(i), n)).num_frames(),
              (n - 400) / 160 + 1)
        << n;
  }
}

TEST(Mfcc, Preconditions) {
  EXPECT_THROW(extract_mfcc(noise(1, 399)), DomainError);
  Waveform w = noise(1, 8000);
  w.sample_rate = 8000;
  EXPECT_THROW(extract_mfcc(w), DomainError);
}

TEST(Mfcc, Deterministic) {
  auto w = noise(5, 5000);
  auto a = extract_mfcc(w), b = extract_mfcc(w);
  EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
}

TEST(Mfcc, FiniteOnSilenceAndExtremes) {
  Waveform silent;
  silent.samples.assign(4000, 0.0);
  Waveform square;
  for (int i = 0; i < 4000; ++i) square.samples.push_back(i % 2 ? 1.0 : -1.0);
  for (const auto& w : {silent, square}) {
    auto seq = mfcc_pipeline(w, "s");
    for (double v : seq.values()) EXPECT_TRUE(std::isfinite(v));
  }
}

TEST(Mfcc, FftMatchesNaiveDft) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  std::vector<double> x(512);
  for (auto& v : x) v = g(rng);
  std::vector<std::complex<double>> a(x.begin(), x.end());
  fft(a);
  auto ref = oracle::dft_magnitude(x, 512);
  for (std::size_t k = 0; k < ref.size(); ++k) EXPECT_NEAR(std::abs(a[k]), ref[k], 1e-9);
}

TEST(Mfcc, FilterbankMatchesIndependentOracle) {
  Waveform w = noise(7, 400);
  MfccConfig cfg;
  auto fb = compute_log_fbank(w, cfg);
  ASSERT_EQ(fb.size(), 23u);
  // Pre-emphasis and Hamming window, applied by hand.
  std::vector<double> frame(w.samples);
  for (std::size_t i = 399; i > 0; --i) frame[i] = w.samples[i] - 0.97 * w.samples[i - 1];
  frame[0] = w.samples[0] * (1.0 - 0.97);
  for (std::size_t i = 0; i < 400; ++i)
    frame[i] *= 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / 399.0);
  auto energies = oracle::mel_filter_energies(oracle::dft_magnitude(frame, 512), 16000.0, 512,
                                              23, 20.0, 8000.0);
  for (std::size_t m = 0; m < 23; ++m) EXPECT_NEAR(fb[m], std::log(energies[m]), 1e-9);
}

TEST(Mfcc, OneKilohertzToneLightsNearestFilter) {
  auto fb = compute_log_fbank(tone(1000.0, 16000));
  std::vector<double> centres;
  std::vector<double> zero(257, 0.0);
  oracle::mel_filter_energies(zero, 16000.0, 512, 23, 20.0, 8000.0, &centres);
  std::size_t nearest = 0;
  for (std::size_t m = 1; m < centres.size(); ++m)
    if (std::abs(centres[m] - 1000.0) < std::abs(centres[nearest] - 1000.0)) nearest = m;
  const std::size_t frames = fb.size() / 23;
  for (std::size_t t = 0; t < frames; ++t) {
    auto row = fb.begin() + static_cast<std::ptrdiff_t>(t * 23);
    EXPECT_EQ(static_cast<std::size_t>(std::max_element(row, row + 23) - row), nearest);
  }
  MelBank bank{MfccConfig{}};
  for (std::size_t m = 0; m < 23; ++m) EXPECT_NEAR(bank.centres_hz()[m], centres[m], 1e-9);
}

TEST(Deltas, ConstantInputGivesZeroDeltas) {
  std::vector<double> v;
  for (int t = 0; t < 20; ++t)
    for (int k = 0; k < 13; ++k) v.push_back(k * 0.7 - 3.0);
  auto out = add_deltas(FeatureSequence("c", 13, v));
  ASSERT_EQ(out.dim(), 39u);
  for (std::size_t t = 0; t < out.num_frames(); ++t)
    for (std::size_t k = 13; k < 39; ++k) EXPECT_EQ(out.frame(t)[k], 0.0);
}

TEST(Deltas, LinearRampHasSlopeDelta) {
  const double slope = 0.25;
  const std::size_t frames = 30;
  std::vector<double> v;
  for (std::size_t t = 0; t < frames; ++t)
    for (int k = 0; k < 13; ++k) v.push_back(k == 4 ? slope * static_cast<double>(t) : 1.0);
  auto out = add_deltas(FeatureSequence("r", 13, v));
  for (std::size_t t = 2; t + 2 < frames; ++t) EXPECT_NEAR(out.frame(t)[13 + 4], slope, 1e-12);
  for (std::size_t t = 4; t + 4 < frames; ++t) EXPECT_NEAR(out.frame(t)[26 + 4], 0.0, 1e-12);
  // Edge replication: first frame sees c_{-1} = c_{-2} = c_0.
  EXPECT_NEAR(out.frame(0)[13 + 4], slope * (1 + 2 * 2) / 10.0, 1e-12);
}

TEST(Deltas, WrongDimension) {
  EXPECT_THROW(add_deltas(FeatureSequence("x", 12, std::vector<double>(24, 1.0))), DomainError);
}

TEST(MovingMvn, ConstantInputGivesZeros) {
  auto out = moving_mvn(FeatureSequence("c", 3, std::vector<double>(3 * 500, 0.1)));
  for (double v : out.values()) EXPECT_EQ(v, 0.0);
}

TEST(MovingMvn, ShortSequenceUsesWholeSequence) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(2.0, 3.0);
  std::vector<double> v(50 * 2);
  for (auto& x : v) x = g(rng);
  auto out = moving_mvn(FeatureSequence("s", 2, v));
  for (std::size_t k = 0; k < 2; ++k) {
    double mean = 0.0, ss = 0.0;
    for (std::size_t t = 0; t < 50; ++t) mean += v[t * 2 + k];
    mean /= 50;
    for (std::size_t t = 0; t < 50; ++t) ss += (v[t * 2 + k] - mean) * (v[t * 2 + k] - mean);
    double sd = std::sqrt(ss / 50);
    for (std::size_t t = 0; t < 50; ++t)
      EXPECT_NEAR(out.frame(t)[k], (v[t * 2 + k] - mean) / sd, 1e-12);
  }
}

TEST(MovingMvn, WhiteNoiseWindowsAreStandardized) {
  // Window statistics of the output, averaged over seeds.
  const std::size_t frames = 3000, dim = 4, seeds = 40, windows = frames / 300;
  std::vector<double> mean_sum(windows * dim, 0.0), sd_sum(windows * dim, 0.0);
  for (std::uint64_t seed = 0; seed < seeds; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(5.0, 3.0);
    std::vector<double> v(frames * dim);
    for (auto& x : v) x = g(rng);
    auto out = moving_mvn(FeatureSequence("n", dim, v));
    for (std::size_t w = 0; w < windows; ++w)
      for (std::size_t k = 0; k < dim; ++k) {
        double mean = 0.0, ss = 0.0;
        for (std::size_t t = w * 300; t < (w + 1) * 300; ++t) mean += out.frame(t)[k];
        mean /= 300;
        for (std::size_t t = w * 300; t < (w + 1) * 300; ++t)
          ss += (out.frame(t)[k] - mean) * (out.frame(t)[k] - mean);
        mean_sum[w * dim + k] += mean;
        sd_sum[w * dim + k] += std::sqrt(ss / 300);
      }
  }
  for (std::size_t i = 0; i < windows * dim; ++i) {
    EXPECT_NEAR(mean_sum[i] / seeds, 0.0, 0.05) << i;
    EXPECT_NEAR(sd_sum[i] / seeds, 1.0, 0.05) << i;
  }
}

TEST(Pipeline, ThirtyNineDimensions) {
  auto seq = mfcc_pipeline(tone(440.0, 12000), "a");
  EXPECT_EQ(seq.dim(), 39u);
  EXPECT_EQ(seq.num_frames(), (12000u - 400u) / 160u + 1u);
  EXPECT_EQ(seq.stimulus_id(), "a");
}

TEST(Pipeline, ConstantWaveformNormalizesToZero) {
  Waveform w;
  w.samples.assign(8000, 0.3);
  auto base = extract_mfcc(w);
  auto with = add_deltas(base);
  for (std::size_t t = 0; t < with.num_frames(); ++t)
    for (std::size_t k = 13; k < 39; ++k) EXPECT_EQ(with.frame(t)[k], 0.0);
  auto normalized = moving_mvn(with);
  for (double v : normalized.values()) EXPECT_EQ(v, 0.0);
}
