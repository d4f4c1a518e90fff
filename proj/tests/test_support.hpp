// tests/test_support.hpp

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

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "abxkit/responses.hpp"
#include "abxkit/trial.hpp"

namespace testing_support {

inline abxkit::Trial make_trial(const std::string& id, const std::string& contrast,
                                abxkit::Language lang = abxkit::Language::native,
                                abxkit::ItemOrder order = abxkit::ItemOrder::AB_A) {
  abxkit::Trial t;
  t.trial_id = id;
  t.target_id = id + "_t";
  t.other_id = id + "_o";
  t.probe_id = id + "_x";
  t.order = order;
  t.correct_position = abxkit::correct_position(order);
  t.contrast = contrast;
  t.context = "l_r";
  t.language = lang;
  t.ref_speaker = "r";
  t.probe_speaker = "p";
  return t;
}

inline abxkit::HumanResponse make_response(const abxkit::Trial& t, const std::string& participant,
                                           int index, bool correct, bool is_catch = false) {
  abxkit::HumanResponse r;
  r.participant_id = participant;
  r.list_id = "L001";
  r.trial_index = index;
  r.trial_id = t.trial_id;
  bool first_correct = t.correct_position == abxkit::Position::first;
  r.scale = (correct == first_correct) ? 2 : 5;
  r.is_catch = is_catch;
  r.choice = abxkit::binarize(r.scale);
  r.correct = r.choice == t.correct_position;
  return r;
}

// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("abxkit_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing_support

namespace testing_support {

// Twenty-row, single-predictor probit fixture with overlapping classes.
inline std::vector<double> probit_fixture_x() {
  std::vector<double> x;
  for (int i = 0; i < 20; ++i) x.push_back(-1.9 + 0.2 * i);
  return x;
}

inline std::vector<int> probit_fixture_y() {
  return {0, 0, 0, 1, 0, 0, 1, 0, 1, 0, 1, 1, 0, 1, 1, 1, 0, 1, 1, 1};
}

}  // namespace testing_support

namespace testing_support {

// Random trial pool in which every contrast holds 1 to 3 trials and
// exactly half the trials have their correct answer first.
inline std::vector<abxkit::Trial> random_trial_pool(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::vector<abxkit::Trial> out;
  std::size_t contrast = 0;
  while (out.size() < n) {
    std::size_t size = std::min<std::size_t>(1 + rng() % 3, n - out.size());
    auto lang = rng() % 2 ? abxkit::Language::native : abxkit::Language::other;
    for (std::size_t k = 0; k < size; ++k) {
      // Alternating first/second answers keep the global split exact.
      auto order = out.size() % 2 ? abxkit::ItemOrder::AB_B : abxkit::ItemOrder::AB_A;
      if (rng() % 2)
        order = order == abxkit::ItemOrder::AB_A ? abxkit::ItemOrder::BA_B
                                                 : abxkit::ItemOrder::BA_A;
      out.push_back(make_trial("t" + std::to_string(out.size()),
                               "k" + std::to_string(contrast), lang, order));
    }
    ++contrast;
  }
  return out;
}

}  // namespace testing_support
