// tests/trial_test.cpp

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

#include <random>
#include <string>

#include <gtest/gtest.h>

#include "abxkit/trial.hpp"

using namespace abxkit;

namespace {

const std::string kHeader =
    "trial_id,target_id,other_id,probe_id,order,contrast,context,language,ref_speaker,probe_speaker\n";

std::string row(const std::string& id, const std::string& order,
                const std::string& target = "a", const std::string& other = "b",
                const std::string& probe = "x", const std::string& ref = "s1",
                const std::string& probe_spk = "s2") {
  return id + "," + target + "," + other + "," + probe + "," + order + ",eI:oU,s_k,native," +
         ref + "," + probe_spk + "\n";
}

}  // namespace

TEST(CorrectPosition, FixedTable) {
  EXPECT_EQ(correct_position(ItemOrder::AB_A), Position::first);
  EXPECT_EQ(correct_position(ItemOrder::BA_B), Position::first);
  EXPECT_EQ(correct_position(ItemOrder::AB_B), Position::second);
  EXPECT_EQ(correct_position(ItemOrder::BA_A), Position::second);
}

TEST(TrialManifest, OrderDeterminesCorrectPosition) {
  auto t = read_trial_manifest(kHeader + row("t1", "AB_A") + row("t2", "AB_B"));
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].correct_position, Position::first);
  EXPECT_EQ(t[1].correct_position, Position::second);
  EXPECT_EQ(t[0].presented().first, "a");
  EXPECT_EQ(t[1].presented().first, "b");
}

TEST(TrialManifest, DuplicateIdNamed) {
  try {
    read_trial_manifest(kHeader + row("dup", "AB_A") + row("dup", "BA_A"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("dup"), std::string::npos);
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(TrialManifest, Rejections) {
  EXPECT_THROW(read_trial_manifest(kHeader + row("t", "AA_B")), ParseError);
  EXPECT_THROW(read_trial_manifest(kHeader + row("t", "AB_A", "a", "a")), ParseError);
  EXPECT_THROW(read_trial_manifest(kHeader + row("t", "AB_A", "a", "b", "a")), ParseError);
  EXPECT_THROW(read_trial_manifest(kHeader + row("t", "AB_A", "a", "b", "x", "s1", "s1")),
               ParseError);
  EXPECT_THROW(read_trial_manifest("trial_id,target_id\n"), ParseError);
  EXPECT_THROW(read_trial_manifest(kHeader + "t,a,b,x,AB_A,c,ctx,native,s1\n"), ParseError);
}

TEST(TrialManifest, RandomizedManifestsSatisfyInvariants) {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 50; ++round) {
    std::vector<Trial> trials;
    std::uniform_int_distribution<int> count(1, 30), pick(0, 3), stim(0, 9);
    int n = count(rng);
    for (int i = 0; i < n; ++i) {
      Trial t;
      t.trial_id = "t" + std::to_string(i);
      int a = stim(rng), b = (a + 1 + stim(rng) % 9) % 10;
      t.target_id = "s" + std::to_string(a);
      t.other_id = "s" + std::to_string(b);
      t.probe_id = "x" + std::to_string(i);
      t.order = kAllOrders[static_cast<std::size_t>(pick(rng))];
      t.correct_position = correct_position(t.order);
      t.contrast = "c" + std::to_string(pick(rng));
      t.context = "l_r";
      t.language = pick(rng) % 2 ? Language::other : Language::native;
      t.ref_speaker = "r";
      t.probe_speaker = "p";
      trials.push_back(t);
    }
    auto back = read_trial_manifest(write_trial_manifest(trials));
    ASSERT_EQ(back.size(), trials.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
      EXPECT_NO_THROW(validate_trial(back[i]));
      EXPECT_EQ(back[i].trial_id, trials[i].trial_id);
      EXPECT_EQ(back[i].order, trials[i].order);
      EXPECT_EQ(back[i].language, trials[i].language);
      EXPECT_NE(back[i].target_id, back[i].other_id);
      EXPECT_NE(back[i].ref_speaker, back[i].probe_speaker);
    }
  }
}
