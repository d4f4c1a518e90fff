// tools/make_smoke_fixture.cpp

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

// Writes the smoke fixture: three speakers reading twelve three-phone
// words (six minimal pairs), rendered as phone-specific tones, plus lists
// and three synthetic response sets. Usage: make_smoke_fixture <out-dir>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "cli.hpp"

namespace {

using namespace abxkit;
namespace fs = std::filesystem;

constexpr std::size_t kListSize = 4;
constexpr std::size_t kRepetitions = 4;
constexpr std::uint64_t kSeed = 1;
constexpr std::size_t kParticipants = 12;
constexpr double kNoisyAccuracy = 0.8;

constexpr int kRate = 16000;
constexpr double kPhoneSeconds = 0.100;
constexpr double kPadSeconds = 0.050;

struct Word {
  std::string left, centre, right;
};

// Six minimal pairs, each with its own context.
const std::vector<std::pair<Word, Word>> kPairs = {
    {{"s", "eI", "k"}, {"s", "oU", "k"}}, {{"b", "i", "t"}, {"b", "u", "t"}},
    {{"m", "a", "n"}, {"m", "o", "n"}},   {{"p", "E", "d"}, {"p", "I", "d"}},
    {{"f", "ae", "g"}, {"f", "V", "g"}},  {{"z", "O", "v"}, {"z", "U", "v"}},
};

const std::vector<std::pair<std::string, double>> kSpeakers = {
    {"spk1", 1.00}, {"spk2", 1.12}, {"spk3", 0.91}};

// Stable per-phone tone frequency in 250..2750 Hz.
double phone_hz(const std::string& phone) {
  std::uint32_t h = 2166136261u;
  for (char c : phone) h = (h ^ static_cast<unsigned char>(c)) * 16777619u;
  return 250.0 + static_cast<double>(h % 2500u);
}

void render_phone(std::vector<double>& out, double hz) {
  const auto n = static_cast<std::size_t>(kPhoneSeconds * kRate);
  const std::size_t ramp = kRate / 100;
  for (std::size_t i = 0; i < n; ++i) {
    double env = 1.0;
    if (i < ramp) env = 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(i) / ramp);
    if (n - i <= ramp)
      env = 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(n - i) / ramp);
    double t = static_cast<double>(i) / kRate;
    out.push_back(0.3 * env * (std::sin(2 * std::numbers::pi * hz * t) +
                               0.4 * std::sin(2 * std::numbers::pi * 2.1 * hz * t)));
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_smoke_fixture <out-dir>\n";
    return 2;
  }
  try {
    const fs::path dir = argv[1];
    cli::Provenance prov{"make-smoke-fixture", kSeed, {}};

    std::string alignment = csv_header(kAlignmentColumns);
    int word_no = 0;
    for (const auto& [a, b] : kPairs)
      for (const Word* w : {&a, &b}) {
        ++word_no;
        for (const auto& [speaker, pitch] : kSpeakers) {
          std::string utt = speaker + "_w" + (word_no < 10 ? "0" : "") + std::to_string(word_no);
          Waveform wav;
          wav.samples.assign(static_cast<std::size_t>(kPadSeconds * kRate), 0.0);
          double t = kPadSeconds;
          for (const std::string* phone : {&w->left, &w->centre, &w->right}) {
            render_phone(wav.samples, pitch * phone_hz(*phone));
            alignment += utt + ',' + speaker + ',' + *phone + ',' + format_real(t) + ',' +
                         format_real(t + kPhoneSeconds) + '\n';
            t += kPhoneSeconds;
          }
          wav.samples.insert(wav.samples.end(), static_cast<std::size_t>(kPadSeconds * kRate),
                             0.0);
          cli::write_atomic(dir / "wav" / (utt + ".wav"), write_wav(wav));
        }
      }
    cli::write_atomic(dir / "alignment.csv", prov.line() + alignment);

    // Trial IDs are whatever the pipeline will mine from this alignment.
    std::vector<Trial> trials;
    for (const auto& s : mine_stimulus_sets(parse_alignment(alignment)))
      for (auto& t : make_items(s)) trials.push_back(std::move(t));
    auto lists = counterbalance(trials, {kListSize, kRepetitions, kSeed});
    if (!check_lists(lists, trials, kListSize, kRepetitions).empty())
      throw ValidationError("generated lists fail check_lists");
    cli::write_atomic(dir / "lists.csv", prov.line() + write_lists(lists));
    cli::write_atomic(dir / "fixture.txt", prov.line() + "list_size=" +
                                               std::to_string(kListSize) + "\nrepetitions=" +
                                               std::to_string(kRepetitions) +
                                               "\nseed=" + std::to_string(kSeed) + "\n");

    std::map<std::string, const Trial*> by_id;
    for (const auto& t : trials) by_id[t.trial_id] = &t;
    Rng rng = make_rng(kSeed, 7);
    std::vector<HumanResponse> correct, inverted, noisy;
    std::vector<int> next_index(kParticipants, 1);
    for (std::size_t k = 0; k < lists.size(); ++k) {
      std::size_t p = k % kParticipants;
      for (const auto& id : lists[k].trial_ids) {
        HumanResponse r;
        r.participant_id = "P" + std::string(p < 9 ? "0" : "") + std::to_string(p + 1);
        r.list_id = lists[k].list_id;
        r.trial_index = next_index[p]++;
        r.trial_id = id;
        bool first = by_id.at(id)->correct_position == Position::first;
        r.scale = first ? 1 : 6;
        correct.push_back(r);
        r.scale = first ? 6 : 1;
        inverted.push_back(r);
        bool right = uniform_real(rng) < kNoisyAccuracy;
        bool says_first = right == first;
        int strength = static_cast<int>(uniform_below(rng, 3));
        r.scale = says_first ? 1 + strength : 4 + strength;
        noisy.push_back(r);
      }
    }
    cli::write_atomic(dir / "responses_correct.csv", prov.line() + write_responses(correct));
    cli::write_atomic(dir / "responses_inverted.csv", prov.line() + write_responses(inverted));
    cli::write_atomic(dir / "responses_noisy.csv", prov.line() + write_responses(noisy));
    std::cout << trials.size() << " trials, " << lists.size() << " lists, " << correct.size()
              << " responses per set\n";
  } catch (const std::exception& e) {
    std::cerr << "make_smoke_fixture: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
