// tests/feature_io_test.cpp

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

#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "abxkit/feature_io.hpp"

using namespace abxkit;

namespace {

std::size_t parse_error_line(const std::string& content, FeatureMode mode) {
  try {
    read_feature_file(content, mode);
  } catch (const ParseError& e) {
    return e.line();
  }
  ADD_FAILURE() << "expected a ParseError";
  return 0;
}

}  // namespace

TEST(FeatureFile, MinimalWellFormed) {
  auto seq = read_feature_file("stimulus_id=s1\ndim=2\n1.0 0.0\n0.0 1.0\n");
  EXPECT_EQ(seq.stimulus_id(), "s1");
  EXPECT_EQ(seq.dim(), 2u);
  ASSERT_EQ(seq.num_frames(), 2u);
  EXPECT_EQ(seq.frame(0)[0], 1.0);
  EXPECT_EQ(seq.frame(1)[1], 1.0);
}

TEST(FeatureFile, ArityErrorNamesLine) {
  // Header occupies lines 1-2, so the first frame is line 3.
  EXPECT_EQ(parse_error_line("stimulus_id=s\ndim=3\n1.0 2.0\n", FeatureMode::general), 3u);
}

TEST(FeatureFile, DistinctErrors) {
  EXPECT_EQ(parse_error_line("id=s\ndim=2\n1 2\n", FeatureMode::general), 1u);
  EXPECT_EQ(parse_error_line("stimulus_id=s\ndim=zero\n1 2\n", FeatureMode::general), 2u);
  EXPECT_EQ(parse_error_line("stimulus_id=s\ndim=2\n1 nan\n", FeatureMode::general), 3u);
  EXPECT_EQ(parse_error_line("stimulus_id=s\ndim=2\n1 inf\n", FeatureMode::general), 3u);
  EXPECT_EQ(parse_error_line("stimulus_id=s\ndim=2\n1 0x1p3\n", FeatureMode::general), 3u);
  EXPECT_EQ(parse_error_line("stimulus_id=s\ndim=2\n", FeatureMode::general), 0u);
  EXPECT_EQ(parse_error_line("stimulus_id=s\ndim=2\n1.5 -0.5\n", FeatureMode::probability), 3u);
  EXPECT_EQ(parse_error_line("stimulus_id=s\ndim=2\n1 2\r\n", FeatureMode::general), 3u);
  EXPECT_EQ(parse_error_line("stimulus_id=s\ndim=2\n1  2\n", FeatureMode::general), 3u);
}

TEST(FeatureFile, ScientificNotationAccepted) {
  auto seq = read_feature_file("stimulus_id=s\ndim=3\n1e-3 -2.5E+2 +4\n");
  EXPECT_DOUBLE_EQ(seq.frame(0)[0], 1e-3);
  EXPECT_DOUBLE_EQ(seq.frame(0)[1], -250.0);
  EXPECT_DOUBLE_EQ(seq.frame(0)[2], 4.0);
}

TEST(FeatureFile, ProbabilityFlooring) {
  auto seq = read_feature_file("stimulus_id=p\ndim=2\n1.0 0.0\n", FeatureMode::probability);
  // Floor 1e-10 then renormalize: (1, 1e-10) / (1 + 1e-10).
  const double eps_prime = 9.9999999990000000001e-11;
  EXPECT_NEAR(seq.frame(0)[0], 1.0 - eps_prime, 1e-16);
  EXPECT_NEAR(seq.frame(0)[1], eps_prime, 1e-24);
}

TEST(FeatureFile, ProbabilityRowMustBeADistribution) {
  EXPECT_THROW(read_feature_file("stimulus_id=p\ndim=2\n0.3 0.3\n", FeatureMode::probability),
               ParseError);
  EXPECT_THROW(read_feature_file("stimulus_id=p\ndim=2\n0 0\n", FeatureMode::probability),
               ParseError);
}

TEST(FeatureFile, CommentLinesBeforeHeader) {
  auto seq = read_feature_file("# abxkit 0.1.0 seed=0\nstimulus_id=s\ndim=1\n2\n");
  EXPECT_EQ(seq.frame(0)[0], 2.0);
}

TEST(FeatureSequence, ConstructorEnforcesInvariants) {
  EXPECT_THROW(FeatureSequence("s", 2, {}), ValidationError);
  EXPECT_THROW(FeatureSequence("s", 2, {1.0, 2.0, 3.0}), ValidationError);
  EXPECT_THROW(FeatureSequence("s", 0, {1.0}), ValidationError);
  EXPECT_THROW(FeatureSequence("s", 1, {std::nan("")}), ValidationError);
  EXPECT_THROW(FeatureSequence("s", 2, {0.5, 0.6}, FeatureMode::probability), ValidationError);
}

TEST(FeatureFile, RoundTripProperty) {
  std::mt19937_64 rng(20260101);
  std::uniform_int_distribution<int> dims(1, 12), lens(1, 40);
  std::normal_distribution<double> value(0.0, 50.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    bool prob = trial % 2 == 1;
    std::size_t d = static_cast<std::size_t>(dims(rng)), n = static_cast<std::size_t>(lens(rng));
    std::vector<double> values(d * n);
    for (std::size_t t = 0; t < n; ++t) {
      double sum = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        values[t * d + k] = prob ? (unit(rng) < 0.2 ? 0.0 : unit(rng)) : value(rng);
        sum += values[t * d + k];
      }
      if (prob) {
        if (sum == 0.0) { values[t * d] = 1.0; sum = 1.0; }
        for (std::size_t k = 0; k < d; ++k) values[t * d + k] /= sum;
        floor_probabilities(std::span<double>(values).subspan(t * d, d));
      }
    }
    auto mode = prob ? FeatureMode::probability : FeatureMode::general;
    FeatureSequence seq("stim" + std::to_string(trial), d, values, mode);
    FeatureSequence back = read_feature_file(write_feature_file(seq), mode);
    ASSERT_EQ(back.stimulus_id(), seq.stimulus_id());
    ASSERT_EQ(back.dim(), d);
    ASSERT_EQ(back.num_frames(), n);
    for (std::size_t k = 0; k < values.size(); ++k)
      ASSERT_NEAR(back.values()[k], seq.values()[k], 1e-9);
  }
}

TEST(FeatureFile, FileNameMustMatchStimulusId) {
  auto dir = std::filesystem::temp_directory_path() / "abxkit_feature_io_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "good.feat") << "stimulus_id=good\ndim=1\n1\n";
    std::ofstream(dir / "bad.feat") << "stimulus_id=other\ndim=1\n1\n";
    std::ofstream(dir / "broken.feat") << "stimulus_id=broken\ndim=2\n1\n";
  }
  EXPECT_EQ(load_feature_file(dir / "good.feat").stimulus_id(), "good");
  EXPECT_THROW(load_feature_file(dir / "bad.feat"), ValidationError);
  try {
    load_feature_file(dir / "broken.feat");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("broken.feat"), std::string::npos);
  }
  EXPECT_THROW(load_feature_file(dir / "missing.feat"), IoError);
  std::filesystem::remove_all(dir);
}
