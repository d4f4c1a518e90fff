// tests/corpus_test.cpp

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
#include <set>

#include <gtest/gtest.h>

#include "abxkit/corpus.hpp"
#include "oracles.hpp"

using namespace abxkit;

namespace {

const std::string kHeader = "utterance_id,speaker_id,phone,start,end\n";

// One utterance per word; phones are 0.1 s each.
std::string alignment(const std::vector<std::tuple<std::string, std::string, std::string>>& words) {
  std::string out = kHeader;
  for (const auto& [utt, spk, phones] : words) {
    double t = 0.0;
    for (auto p : split_fields(phones)) {
      out += utt + ',' + spk + ',' + std::string(p) + ',' + format_real(t) + ',' +
             format_real(t + 0.1) + '\n';
      t += 0.1;
    }
  }
  return out;
}

std::vector<std::vector<oracle::Phone>> utterances(const std::vector<AlignmentEntry>& entries) {
  std::vector<std::vector<oracle::Phone>> out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i == 0 || entries[i].utterance_id != entries[i - 1].utterance_id) out.emplace_back();
    out.back().push_back({entries[i].utterance_id, entries[i].speaker_id, entries[i].phone});
  }
  return out;
}

std::set<std::tuple<std::string, std::string, std::string, std::string>> keys(
    const std::vector<StimulusSet>& sets) {
  std::set<std::tuple<std::string, std::string, std::string, std::string>> out;
  for (const auto& s : sets) out.insert({s.a.id, s.b.id, s.xa.id, s.xb.id});
  return out;
}

}  // namespace

TEST(Alignment, WellFormedRows) {
  auto e = parse_alignment(kHeader + "u1,s1,s,0,0.1\nu1,s1,eI,0.1,0.25\nu1,s1,k,0.25,0.4\n");
  ASSERT_EQ(e.size(), 3u);
  EXPECT_EQ(e[1].phone, "eI");
  EXPECT_EQ(e[2].end, 0.4);
}

TEST(Alignment, SortsWithinUtterance) {
  auto e = parse_alignment(kHeader + "u1,s1,k,0.2,0.3\nu1,s1,s,0,0.1\nu1,s1,a,0.1,0.2\n");
  EXPECT_EQ(e[0].phone, "s");
  EXPECT_EQ(e[2].phone, "k");
}

TEST(Alignment, OverlapNamesBothLines) {
  try {
    parse_alignment(kHeader + "u1,s1,s,0,0.15\nu2,s2,a,0,1\nu1,s1,eI,0.1,0.2\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Alignment, Errors) {
  EXPECT_THROW(parse_alignment(kHeader + "u1,s1,s,0.2,0.2\n"), ParseError);
  EXPECT_THROW(parse_alignment(kHeader + "u1,s1,s,0.3,0.2\n"), ParseError);
  EXPECT_THROW(parse_alignment(kHeader + "u1,s1,s,-1,0.2\n"), ParseError);
  EXPECT_THROW(parse_alignment(kHeader + "u1,s1,s,0,x\n"), ParseError);
  EXPECT_THROW(parse_alignment(kHeader + "u1,s1,a:b,0,1\n"), ParseError);
  EXPECT_THROW(parse_alignment(kHeader + "u1,s1,s,0,1,extra\n"), ParseError);
  EXPECT_THROW(parse_alignment(kHeader + "u1,s1,s,0,1\nu1,s2,t,1,2\n"), ParseError);
}

TEST(Mining, TwoSpeakerFixture) {
  // s2 needs both tokens: each set carries a probe for either reference.
  auto entries = parse_alignment(alignment({{"w1", "s1", "s eI k"},
                                            {"w2", "s1", "s oU k"},
                                            {"w3", "s2", "s eI k"},
                                            {"w4", "s2", "s oU k"}}));
  auto sets = mine_stimulus_sets(entries);
  EXPECT_EQ(keys(sets), oracle::brute_force_sets(utterances(entries)));
  ASSERT_EQ(sets.size(), 2u);
  EXPECT_EQ(sets[0].contrast(), "eI:oU");
  EXPECT_EQ(sets[0].context(), "s_k");
  EXPECT_EQ(sets[0].ref_speaker(), "s1");
  EXPECT_EQ(sets[0].probe_speaker(), "s2");
  EXPECT_EQ(sets[0].id, "w1-0+w2-0+w3-0+w4-0");
  EXPECT_EQ(sets[1].ref_speaker(), "s2");

  // With only one of the two tokens from s2 there is no complete set.
  auto partial = parse_alignment(alignment(
      {{"w1", "s1", "s eI k"}, {"w2", "s1", "s oU k"}, {"w3", "s2", "s eI k"}}));
  EXPECT_TRUE(mine_stimulus_sets(partial).empty());
  EXPECT_TRUE(oracle::brute_force_sets(utterances(partial)).empty());
}

TEST(Mining, OneSpeakerIsEmpty) {
  auto entries = parse_alignment(
      alignment({{"w1", "s1", "s eI k"}, {"w2", "s1", "s oU k"}, {"w3", "s1", "s eI k"}}));
  EXPECT_TRUE(mine_stimulus_sets(entries).empty());
}

TEST(Mining, IdenticalCentresExcluded) {
  auto entries = parse_alignment(alignment({{"w1", "s1", "s eI k"},
                                            {"w2", "s1", "s eI k"},
                                            {"w3", "s2", "s eI k"},
                                            {"w4", "s2", "s eI k"}}));
  EXPECT_TRUE(mine_stimulus_sets(entries).empty());
}

TEST(Mining, Filters) {
  auto entries = parse_alignment(alignment({{"w1", "s1", "s eI k"}, {"w2", "s1", "s oU k"},
                                            {"w3", "s2", "s eI k"}, {"w4", "s2", "s oU k"},
                                            {"w5", "s1", "t i m"},  {"w6", "s1", "t u m"},
                                            {"w7", "s2", "t i m"},  {"w8", "s2", "t u m"}}));
  EXPECT_EQ(mine_stimulus_sets(entries).size(), 4u);
  MiningFilter f;
  f.excluded_contexts = {"s_k"};
  EXPECT_EQ(mine_stimulus_sets(entries, f).size(), 2u);
  MiningFilter g;
  g.allowed_centres = {"eI", "oU"};
  g.language = Language::other;
  auto sets = mine_stimulus_sets(entries, g);
  ASSERT_EQ(sets.size(), 2u);
  EXPECT_EQ(sets[0].language, Language::other);
}

// Random corpora over a tiny inventory; mining must agree with the
// quadruple enumeration and every set must satisfy its invariants.
TEST(Mining, MatchesBruteForceOnRandomCorpora) {
  const std::vector<std::string> inventory = {"a", "b", "c", "d"};
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::tuple<std::string, std::string, std::string>> words;
    int n_utts = 3 + static_cast<int>(rng() % 6);
    for (int u = 0; u < n_utts; ++u) {
      std::string phones;
      int len = 2 + static_cast<int>(rng() % 5);
      for (int p = 0; p < len; ++p) phones += (p ? " " : "") + inventory[rng() % 4];
      words.push_back({"u" + std::to_string(u), "s" + std::to_string(rng() % 3), phones});
    }
    auto entries = parse_alignment(alignment(words));
    auto sets = mine_stimulus_sets(entries);
    ASSERT_EQ(keys(sets), oracle::brute_force_sets(utterances(entries))) << "seed " << seed;
    for (const auto& s : sets) {
      EXPECT_NO_THROW(validate_set(s));
      auto items = make_items(s);
      auto back = read_trial_manifest(write_trial_manifest(items));
      ASSERT_EQ(back.size(), 4u);
      for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(back[i].trial_id, items[i].trial_id);
        EXPECT_EQ(back[i].target_id, items[i].target_id);
        EXPECT_EQ(back[i].probe_id, items[i].probe_id);
        EXPECT_EQ(back[i].order, items[i].order);
      }
    }
    // Determinism.
    auto again = mine_stimulus_sets(entries);
    ASSERT_EQ(again.size(), sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) EXPECT_EQ(again[i].id, sets[i].id);
  }
}

TEST(MakeItems, FourOrdersWithMatchingProbes) {
  auto entries = parse_alignment(alignment({{"w1", "s1", "s eI k"},
                                            {"w2", "s1", "s oU k"},
                                            {"w3", "s2", "s eI k"},
                                            {"w4", "s2", "s oU k"}}));
  auto set = mine_stimulus_sets(entries).at(0);
  auto items = make_items(set);
  ASSERT_EQ(items.size(), 4u);
  std::set<ItemOrder> orders;
  for (const auto& t : items) {
    orders.insert(t.order);
    EXPECT_EQ(t.correct_position, correct_position(t.order));
    EXPECT_NO_THROW(validate_trial(t));
    const Segment& probe = t.probe_id == set.xa.id ? set.xa : set.xb;
    const Segment& target = t.target_id == set.a.id ? set.a : set.b;
    EXPECT_EQ(probe.phones, target.phones);
  }
  EXPECT_EQ(orders.size(), 4u);
  EXPECT_EQ(items[0].order, ItemOrder::AB_A);
  EXPECT_EQ(items[0].probe_id, set.xa.id);
  EXPECT_EQ(items[0].presented().first, set.a.id);
  EXPECT_EQ(items[0].trial_id, set.id + "+AB_A");
  // Re-mining yields the same IDs.
  auto items2 = make_items(mine_stimulus_sets(entries).at(0));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(items2[i].trial_id, items[i].trial_id);
}

TEST(Sets, RoundTrip) {
  auto entries = parse_alignment(alignment({{"w1", "s1", "s eI k"}, {"w2", "s1", "s oU k"},
                                            {"w3", "s2", "s eI k"}, {"w4", "s2", "s oU k"}}));
  auto sets = mine_stimulus_sets(entries);
  auto back = read_sets(write_sets(sets));
  ASSERT_EQ(back.size(), sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    EXPECT_EQ(back[i].id, sets[i].id);
    EXPECT_EQ(back[i].xb.id, sets[i].xb.id);
    EXPECT_EQ(back[i].a.phones, sets[i].a.phones);
    EXPECT_EQ(back[i].b.end, sets[i].b.end);
  }
}

TEST(Audio, ThreeOneSecondClips) {
  Waveform one{std::vector<double>(16000, 0.25), 16000};
  auto trial = assemble_trial_audio(one, one, one);
  ASSERT_EQ(trial.samples.size(), 66400u);
  for (std::size_t i = 16000; i < 24000; ++i) ASSERT_EQ(trial.samples[i], 0.0);
  for (std::size_t i = 40000; i < 50400; ++i) ASSERT_EQ(trial.samples[i], 0.0);
  EXPECT_EQ(trial.samples[15999], 0.25);
  EXPECT_EQ(trial.samples[24000], 0.25);
  EXPECT_EQ(trial.samples[50400], 0.25);
  EXPECT_EQ(read_wav(write_wav(trial)).samples.size(), 66400u);
}

TEST(Audio, ArbitraryLengths) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    std::size_t a = 1 + rng() % 5000, b = 1 + rng() % 5000, x = 1 + rng() % 5000;
    Waveform wa{std::vector<double>(a, 0.1), 16000}, wb{std::vector<double>(b, 0.2), 16000},
        wx{std::vector<double>(x, 0.3), 16000};
    EXPECT_EQ(assemble_trial_audio(wa, wb, wx).samples.size(), a + b + x + 8000 + 10400);
  }
}

TEST(Audio, Errors) {
  Waveform a{std::vector<double>(10, 0.0), 16000}, b{std::vector<double>(10, 0.0), 8000};
  EXPECT_THROW(assemble_trial_audio(a, b, a), DomainError);
  Waveform w{std::vector<double>(16000, 0.0), 16000};
  EXPECT_EQ(cut_segment(w, 0.1, 0.4).samples.size(), 4800u);
  EXPECT_THROW(cut_segment(w, 0.5, 1.5), DomainError);
}
