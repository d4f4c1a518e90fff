// tools/cli.hpp

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

// The `abxkit` command. run() is the whole program minus main(), so tests
// can drive it in-process.

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "abxkit/abxkit.hpp"
#include "smoke.hpp"

namespace abxkit::cli {

namespace fs = std::filesystem;

inline constexpr std::string_view kVersion = "0.1.0";

/// One `# abxkit ...` line identifying the producing run.
struct Provenance {
  std::string command;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> config;

  std::string line() const {
    std::string out = "# abxkit " + std::string(kVersion) + " command=" + command +
                      " seed=" + std::to_string(seed);
    for (const auto& [k, v] : config) out += ' ' + k + '=' + v;
    return out + '\n';
  }
};

namespace detail {

inline fs::path temp_dir_for(const fs::path& dest) {
  if (const char* env = std::getenv("ABXKIT_TMPDIR"); env && *env) return env;
  fs::path dir = dest.parent_path();
  return dir.empty() ? fs::path(".") : dir;
}

inline std::string temp_name(const fs::path& dest) {
  static std::atomic<std::uint64_t> counter{0};
  return "." + dest.filename().string() + ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(counter++);
}

inline void write_plain(const fs::path& path, std::string_view content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot create '" + path.string() + "'");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  f.close();
  if (!f) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace detail

/// Temp file, then rename over `dest`. When ABXKIT_TMPDIR is on another
/// file system the temp file is first copied next to `dest`.
inline void write_atomic(const fs::path& dest, std::string_view content) {
  fs::path dir = dest.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
  fs::path tmp = detail::temp_dir_for(dest) / detail::temp_name(dest);
  detail::write_plain(tmp, content);
  std::error_code ec;
  fs::rename(tmp, dest, ec);
  if (!ec) return;
  fs::path local = (dir.empty() ? fs::path(".") : dir) / detail::temp_name(dest);
  fs::copy_file(tmp, local, fs::copy_options::overwrite_existing, ec);
  fs::remove(tmp);
  if (ec) throw IoError("cannot stage '" + dest.string() + "': " + ec.message());
  fs::rename(local, dest, ec);
  if (ec) {
    fs::remove(local);
    throw IoError("cannot rename onto '" + dest.string() + "': " + ec.message());
  }
}

/// Shared state of one invocation.
class Context {
 public:
  Context(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }

  void input(const fs::path& p) { inputs_.push_back(p); }

  /// Writes a table with the provenance line first; "-" means stdout.
  void emit(const fs::path& dest, const Provenance& prov, std::string_view body) {
    std::string content = prov.line();
    content += body;
    if (dest == "-") {
      out_ << content;
      return;
    }
    guard(dest);
    write_atomic(dest, content);
  }

  void emit_raw(const fs::path& dest, std::string_view content) {
    guard(dest);
    write_atomic(dest, content);
  }

  void warn(const std::string& message) { err_ << "abxkit: warning: " << message << '\n'; }

 private:
  // Refuse to overwrite anything this run reads.
  void guard(const fs::path& dest) {
    std::error_code ec;
    for (const auto& in : inputs_)
      if (fs::exists(dest, ec) && fs::equivalent(dest, in, ec))
        throw ValidationError("output '" + dest.string() + "' would overwrite input '" +
                              in.string() + "'");
  }

  std::ostream& out_;
  std::ostream& err_;
  std::vector<fs::path> inputs_;
};

template <class Parse>
auto parse_file(Context& ctx, const fs::path& path, Parse&& parse) {
  ctx.input(path);
  std::string content = read_file(path);
  try {
    return parse(std::string_view(content));
  } catch (const ParseError& e) {
    throw e.with_source(path.string());
  }
}

inline std::vector<Trial> load_trials(Context& ctx, const fs::path& p) {
  return parse_file(ctx, p, [](std::string_view c) { return read_trial_manifest(c); });
}

inline std::vector<DiscriminabilityRecord> load_records(Context& ctx, const fs::path& p) {
  return parse_file(ctx, p, [](std::string_view c) { return read_records(c); });
}

inline std::vector<HumanResponse> load_responses(Context& ctx, const fs::path& p,
                                                 std::span<const Trial> trials) {
  return parse_file(ctx, p, [&](std::string_view c) { return ingest_responses(c, trials); });
}

inline std::vector<StimulusSet> load_sets(Context& ctx, const fs::path& p) {
  return parse_file(ctx, p, [](std::string_view c) { return read_sets(c); });
}

inline Waveform load_wav(Context& ctx, const fs::path& p) {
  ctx.input(p);
  std::string bytes = read_file(p);
  try {
    return read_wav(bytes);
  } catch (const WavError& e) {
    throw WavError(p.string() + ": " + std::string(e.what()).substr(5));
  }
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  for (auto part : split(s, ','))
    if (!part.empty()) out.emplace_back(part);
  return out;
}

inline std::string join_list(const std::vector<std::string>& v) {
  return v.empty() ? "-" : join(v, "|");
}

// ---------------------------------------------------------------------------
// Subcommands. Each registers its flags and returns the action to run.

using Action = std::function<void(Context&)>;

inline Action add_extract_mfcc(CLI::App& app) {
  auto* sub = app.add_subcommand("extract-mfcc", "39-dim MFCC features for every WAV in a directory");
  struct Opts {
    std::string wav_dir, out_dir;
    std::size_t threads = default_thread_count();
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--wav-dir", o->wav_dir, "Directory of <stimulus_id>.wav files")->required();
  sub->add_option("--out-dir", o->out_dir, "Destination for <stimulus_id>.feat")->required();
  sub->add_option("--threads", o->threads)->check(CLI::Range(1, 1024));
  return [o](Context& ctx) {
    std::vector<fs::path> wavs;
    if (!fs::is_directory(o->wav_dir)) throw IoError("not a directory: '" + o->wav_dir + "'");
    for (const auto& e : fs::directory_iterator(o->wav_dir))
      if (e.is_regular_file() && e.path().extension() == ".wav") wavs.push_back(e.path());
    std::sort(wavs.begin(), wavs.end());
    if (wavs.empty()) throw ValidationError("no .wav files in '" + o->wav_dir + "'");
    std::vector<Waveform> audio;
    for (const auto& p : wavs) audio.push_back(load_wav(ctx, p));
    std::vector<std::string> files(wavs.size());
    parallel_for(wavs.size(), o->threads, [&](std::size_t i) {
      std::string id = wavs[i].stem().string();
      try {
        files[i] = write_feature_file(mfcc_pipeline(audio[i], id));
      } catch (const Error& e) {
        throw DomainError("stimulus '" + id + "': " + e.what());
      }
    });
    Provenance prov{"extract-mfcc", 0, {{"features", "mfcc39"}}};
    for (std::size_t i = 0; i < wavs.size(); ++i)
      ctx.emit(fs::path(o->out_dir) / (wavs[i].stem().string() + ".feat"), prov, files[i]);
    ctx.out() << "wrote " << wavs.size() << " feature files to " << o->out_dir << '\n';
  };
}

inline Action add_score(CLI::App& app) {
  auto* sub = app.add_subcommand("score", "DTW discriminability of every trial");
  struct Opts {
    std::string features, trials, gamma, mode, out;
    std::size_t threads = default_thread_count();
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--features", o->features, "Directory of <stimulus_id>.feat")->required();
  sub->add_option("--trials", o->trials, "Trial manifest")->required();
  sub->add_option("--gamma", o->gamma, "Frame divergence")
      ->required()
      ->check(CLI::IsMember({"kl", "cosine"}));
  sub->add_option("--mode", o->mode, "Feature mode (default: probability for kl)")
      ->check(CLI::IsMember({"general", "probability"}));
  sub->add_option("--out", o->out, "Records table, or - for stdout")->required();
  sub->add_option("--threads", o->threads)->check(CLI::Range(1, 1024));
  return [o](Context& ctx) {
    Divergence kind = o->gamma == "kl" ? Divergence::symmetrized_kl : Divergence::angular_cosine;
    std::string mode_name = o->mode.empty() ? (o->gamma == "kl" ? "probability" : "general")
                                            : o->mode;
    FeatureMode mode = mode_name == "probability" ? FeatureMode::probability : FeatureMode::general;
    auto trials = load_trials(ctx, o->trials);
    std::set<std::string> ids;
    for (const auto& t : trials) ids.insert({t.target_id, t.other_id, t.probe_id});
    FeatureMap features;
    for (const auto& id : ids) {
      fs::path p = fs::path(o->features) / (id + ".feat");
      if (!fs::exists(p))
        throw ValidationError("missing features for stimulus '" + id + "' (" + p.string() + ")");
      ctx.input(p);
      features.emplace(id, load_feature_file(p, mode));
    }
    auto records = score_trials(trials, features, kind, o->threads);
    ctx.emit(o->out, {"score", 0, {{"gamma", o->gamma}, {"mode", mode_name}}},
             write_records(records));
    ctx.out() << "scored " << records.size() << " trials\n";
  };
}

inline Action add_accuracy(CLI::App& app) {
  auto* sub = app.add_subcommand("accuracy", "Stimulus/contrast/language accuracy");
  struct Opts {
    std::string trials, records, responses, out;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--trials", o->trials)->required();
  auto* rec = sub->add_option("--records", o->records, "Model records (delta > 0 is correct)");
  auto* rsp = sub->add_option("--responses", o->responses, "Raw human responses");
  rec->excludes(rsp);
  sub->add_option("--out", o->out)->required();
  return [o](Context& ctx) {
    if (o->records.empty() == o->responses.empty())
      throw CLI::ValidationError("accuracy", "exactly one of --records or --responses is required");
    auto trials = load_trials(ctx, o->trials);
    AccuracyReport report;
    std::string source;
    if (!o->records.empty()) {
      report = model_accuracy(load_records(ctx, o->records), trials);
      source = "model";
    } else {
      report = human_accuracy(load_responses(ctx, o->responses, trials), trials);
      source = "human";
    }
    ctx.emit(o->out, {"accuracy", 0, {{"source", source}}}, write_accuracy_report(report));
    ctx.out() << "overall " << format_fixed(100.0 * report.overall, 1) << "%\n";
  };
}

inline Action add_scatter(CLI::App& app) {
  auto* sub = app.add_subcommand("scatter", "Per-contrast human accuracy vs mean delta, z-scored");
  struct Opts {
    std::string trials, records, responses, out;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--trials", o->trials)->required();
  sub->add_option("--records", o->records)->required();
  sub->add_option("--responses", o->responses)->required();
  sub->add_option("--out", o->out)->required();
  return [o](Context& ctx) {
    auto trials = load_trials(ctx, o->trials);
    auto table = scatter_export(load_records(ctx, o->records),
                                load_responses(ctx, o->responses, trials), trials);
    for (const auto& s : table.skipped) ctx.warn("skipped " + s);
    ctx.emit(o->out, {"scatter", 0, {}}, write_scatter(table));
  };
}

inline Action add_fit(CLI::App& app) {
  auto* sub = app.add_subcommand("fit", "Probit fit of responses on one model's delta");
  struct Opts {
    std::string trials, records, responses, out;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--trials", o->trials)->required();
  sub->add_option("--records", o->records)->required();
  sub->add_option("--responses", o->responses)->required();
  sub->add_option("--out", o->out)->required();
  return [o](Context& ctx) {
    auto trials = load_trials(ctx, o->trials);
    auto records = load_records(ctx, o->records);
    auto responses = load_responses(ctx, o->responses, trials);
    DesignMatrix d = build_design(responses, records, trials);
    ProbitFit fit = fit_design(d);
    for (const auto& w : d.warnings) ctx.warn(w);
    if (fit.separation_flag) ctx.warn("separation detected; ridge-penalized estimates reported");
    if (!fit.converged) ctx.warn("fit did not converge");
    ctx.emit(o->out, {"fit", 0, {}}, write_fit_summary(fit, d.warnings));
  };
}

inline Action add_compare(CLI::App& app) {
  auto* sub = app.add_subcommand("compare", "Resampled log-likelihood comparison of models");
  struct Opts {
    std::vector<std::string> models;
    std::string trials, responses, out;
    std::size_t resamples = 1000, per_stimulus = 3;
    std::uint64_t seed = 0;
    bool fixed = false;
    std::size_t threads = default_thread_count();
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--models", o->models, "name=records.csv, comma separated")
      ->required()
      ->delimiter(',');
  sub->add_option("--trials", o->trials)->required();
  sub->add_option("--responses", o->responses)->required();
  sub->add_option("--resamples", o->resamples)->check(CLI::Range(1, 1'000'000));
  sub->add_option("--per-stimulus", o->per_stimulus)->check(CLI::Range(1, 1000));
  sub->add_option("--seed", o->seed);
  sub->add_flag("--fixed", o->fixed, "Fit once on all data instead of per resample");
  sub->add_option("--out", o->out)->required();
  sub->add_option("--threads", o->threads)->check(CLI::Range(1, 1024));
  return [o](Context& ctx) {
    auto trials = load_trials(ctx, o->trials);
    auto responses = load_responses(ctx, o->responses, trials);
    std::vector<ModelScores> models;
    std::vector<std::string> names;
    for (const auto& spec : o->models) {
      auto eq = spec.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
        throw CLI::ValidationError("--models", "expected name=path, got '" + spec + "'");
      models.push_back({spec.substr(0, eq), load_records(ctx, spec.substr(eq + 1))});
      names.push_back(spec.substr(0, eq));
    }
    ComparisonOptions opts;
    opts.resamples = o->resamples;
    opts.seed = o->seed;
    opts.per_stimulus = o->per_stimulus;
    opts.refit = !o->fixed;
    opts.threads = o->threads;
    auto result = compare_models(models, responses, trials, opts);
    for (const auto& w : result.warnings) ctx.warn(w);
    Provenance prov{"compare", o->seed,
                    {{"models", join_list(names)},
                     {"resamples", std::to_string(o->resamples)},
                     {"per_stimulus", std::to_string(o->per_stimulus)},
                     {"mode", o->fixed ? "fixed" : "refit"},
                     {"subsample", std::to_string(result.subsample_size)}}};
    ctx.emit(o->out, prov, write_comparison(result));
    for (std::size_t i = 0; i < result.models.size(); ++i)
      ctx.out() << result.models[i] << " mean_ll=" << format_real(result.mean_log_likelihood[i])
                << " failures=" << result.fit_failures[i] << '\n';
  };
}

inline Action add_mine(CLI::App& app) {
  auto* sub = app.add_subcommand("mine", "Stimulus sets from a phone alignment");
  struct Opts {
    std::string alignment, language = "native", centres, exclude, out;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--alignment", o->alignment)->required();
  sub->add_option("--language", o->language)->check(CLI::IsMember({"native", "other"}));
  sub->add_option("--centres", o->centres, "Allowed centre phones, comma separated");
  sub->add_option("--exclude-contexts", o->exclude, "Excluded l_r contexts, comma separated");
  sub->add_option("--out", o->out)->required();
  return [o](Context& ctx) {
    auto entries = parse_file(ctx, o->alignment,
                              [](std::string_view c) { return parse_alignment(c); });
    MiningFilter filter;
    for (auto& c : split_list(o->centres)) filter.allowed_centres.insert(c);
    for (auto& c : split_list(o->exclude)) filter.excluded_contexts.insert(c);
    filter.language = *parse_language(o->language);
    auto sets = mine_stimulus_sets(entries, filter);
    Provenance prov{"mine", 0,
                    {{"language", o->language},
                     {"centres", join_list(split_list(o->centres))},
                     {"exclude_contexts", join_list(split_list(o->exclude))}}};
    ctx.emit(o->out, prov, write_sets(sets));
    ctx.out() << "mined " << sets.size() << " stimulus sets\n";
  };
}

inline Action add_make_items(CLI::App& app) {
  auto* sub = app.add_subcommand("make-items", "Four ordered trials per stimulus set");
  struct Opts {
    std::string sets, out;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--sets", o->sets)->required();
  sub->add_option("--out", o->out)->required();
  return [o](Context& ctx) {
    std::vector<Trial> trials;
    for (const auto& s : load_sets(ctx, o->sets))
      for (auto& t : make_items(s)) trials.push_back(std::move(t));
    ctx.emit(o->out, {"make-items", 0, {}}, write_trial_manifest(trials));
    ctx.out() << "made " << trials.size() << " trials\n";
  };
}

inline Action add_assemble(CLI::App& app) {
  auto* sub = app.add_subcommand("assemble", "Cut stimulus segments and build trial audio");
  struct Opts {
    std::string sets, trials, wav_dir, out_dir;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--sets", o->sets)->required();
  sub->add_option("--trials", o->trials, "Manifest (default: make-items of --sets)");
  sub->add_option("--wav-dir", o->wav_dir, "Directory of <utterance_id>.wav")->required();
  sub->add_option("--out-dir", o->out_dir, "Receives stimuli/ and trials/")->required();
  return [o](Context& ctx) {
    auto sets = load_sets(ctx, o->sets);
    std::vector<Trial> trials;
    if (!o->trials.empty()) {
      trials = load_trials(ctx, o->trials);
    } else {
      for (const auto& s : sets)
        for (auto& t : make_items(s)) trials.push_back(std::move(t));
    }
    std::map<std::string, const Segment*> segments;
    for (const auto& s : sets)
      for (const Segment* seg : {&s.a, &s.b, &s.xa, &s.xb}) segments.emplace(seg->id, seg);

    std::map<std::string, Waveform> utterances;
    std::map<std::string, Waveform> stimuli;
    for (const auto& [id, seg] : segments) {
      auto it = utterances.find(seg->utterance_id);
      if (it == utterances.end()) {
        fs::path p = fs::path(o->wav_dir) / (seg->utterance_id + ".wav");
        it = utterances.emplace(seg->utterance_id, load_wav(ctx, p)).first;
      }
      try {
        stimuli.emplace(id, cut_segment(it->second, seg->start, seg->end));
      } catch (const DomainError& e) {
        throw DomainError("stimulus '" + id + "': " + e.what());
      }
    }
    std::string comment = Provenance{"assemble", 0, {}}.line();
    comment.pop_back();
    for (const auto& [id, w] : stimuli)
      ctx.emit_raw(fs::path(o->out_dir) / "stimuli" / (id + ".wav"), write_wav(w, comment));
    for (const auto& t : trials) {
      auto find = [&](const std::string& id) -> const Waveform& {
        auto it = stimuli.find(id);
        if (it == stimuli.end())
          throw ValidationError("trial '" + t.trial_id + "': stimulus '" + id +
                                "' is not a segment of any set");
        return it->second;
      };
      auto [first, second] = t.presented();
      Waveform audio = assemble_trial_audio(find(first), find(second), find(t.probe_id));
      ctx.emit_raw(fs::path(o->out_dir) / "trials" / (t.trial_id + ".wav"),
                   write_wav(audio, comment));
    }
    ctx.out() << "wrote " << stimuli.size() << " stimuli and " << trials.size()
              << " trial recordings\n";
  };
}

inline Action add_counterbalance(CLI::App& app) {
  auto* sub = app.add_subcommand("counterbalance", "Assign trials to experiment lists");
  struct Opts {
    std::string trials, participants, out;
    std::size_t list_size = 190, repetitions = 3, budget = 1'000'000;
    std::uint64_t seed = 0;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--trials", o->trials)->required();
  sub->add_option("--list-size", o->list_size)->check(CLI::Range(1, 1'000'000));
  sub->add_option("--repetitions", o->repetitions)->check(CLI::Range(1, 1000));
  sub->add_option("--seed", o->seed);
  sub->add_option("--step-budget", o->budget)->check(CLI::Range(1, 1'000'000'000));
  sub->add_option("--out", o->out)->required();
  return [o](Context& ctx) {
    auto trials = load_trials(ctx, o->trials);
    auto lists = counterbalance(trials, {o->list_size, o->repetitions, o->seed, o->budget});
    Provenance prov{"counterbalance", o->seed,
                    {{"list_size", std::to_string(o->list_size)},
                     {"repetitions", std::to_string(o->repetitions)}}};
    ctx.emit(o->out, prov, write_lists(lists));
    ctx.out() << "built " << lists.size() << " lists\n";
  };
}

inline Action add_check_lists(CLI::App& app) {
  auto* sub = app.add_subcommand("check-lists", "Verify list constraints");
  struct Opts {
    std::string lists, trials, out;
    std::size_t list_size = 190, repetitions = 3;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--lists", o->lists)->required();
  sub->add_option("--trials", o->trials)->required();
  sub->add_option("--list-size", o->list_size)->check(CLI::Range(1, 1'000'000));
  sub->add_option("--repetitions", o->repetitions)->check(CLI::Range(1, 1000));
  sub->add_option("--out", o->out, "Violation report");
  return [o](Context& ctx) {
    auto trials = load_trials(ctx, o->trials);
    auto lists = parse_file(ctx, o->lists, [](std::string_view c) { return read_lists(c); });
    auto violations = check_lists(lists, trials, o->list_size, o->repetitions);
    if (!o->out.empty()) {
      std::string body = "kind,list_id,detail\n";
      for (const auto& v : violations)
        body += std::string(to_string(v.kind)) + ',' + v.list_id + ',' + v.detail + '\n';
      ctx.emit(o->out, {"check-lists", 0,
                        {{"list_size", std::to_string(o->list_size)},
                         {"repetitions", std::to_string(o->repetitions)}}},
               body);
    }
    if (!violations.empty())
      throw ValidationError(std::to_string(violations.size()) + " list violation(s); first: " +
                            std::string(to_string(violations[0].kind)) +
                            (violations[0].list_id.empty() ? "" : " in " + violations[0].list_id) +
                            ": " + violations[0].detail);
    ctx.out() << lists.size() << " lists ok\n";
  };
}

inline Action add_ingest(CLI::App& app) {
  auto* sub = app.add_subcommand("ingest-responses", "Validate and binarize raw responses");
  struct Opts {
    std::string responses, trials, out;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--responses", o->responses)->required();
  sub->add_option("--trials", o->trials)->required();
  sub->add_option("--out", o->out)->required();
  return [o](Context& ctx) {
    auto trials = load_trials(ctx, o->trials);
    auto responses = load_responses(ctx, o->responses, trials);
    ctx.emit(o->out, {"ingest-responses", 0, {}}, write_ingested_responses(responses));
    ctx.out() << "ingested " << responses.size() << " responses\n";
  };
}

inline Action add_validate(CLI::App& app) {
  auto* sub = app.add_subcommand("validate-participants", "Catch-trial and completion screening");
  struct Opts {
    std::string responses, trials, out;
    int catch_total = 12, fail_threshold = 3, expected = 0;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--responses", o->responses)->required();
  sub->add_option("--trials", o->trials)->required();
  sub->add_option("--catch-total", o->catch_total)->check(CLI::Range(0, 100000));
  sub->add_option("--fail-threshold", o->fail_threshold)->check(CLI::Range(1, 100000));
  sub->add_option("--expected-trials", o->expected)->check(CLI::Range(0, 1000000));
  sub->add_option("--out", o->out)->required();
  return [o](Context& ctx) {
    auto trials = load_trials(ctx, o->trials);
    auto verdicts = validate_participants(load_responses(ctx, o->responses, trials),
                                          {o->catch_total, o->fail_threshold, o->expected});
    Provenance prov{"validate-participants", 0,
                    {{"catch_total", std::to_string(o->catch_total)},
                     {"fail_threshold", std::to_string(o->fail_threshold)},
                     {"expected_trials", std::to_string(o->expected)}}};
    ctx.emit(o->out, prov, write_verdicts(verdicts));
    auto rejected = std::count_if(verdicts.begin(), verdicts.end(),
                                  [](const ParticipantVerdict& v) { return !v.accepted; });
    ctx.out() << verdicts.size() << " participants, " << rejected << " rejected\n";
  };
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

inline Action add_smoke(CLI::App& app) {
  auto* sub = app.add_subcommand("smoke", "End-to-end pipeline check on a fixture");
  struct Opts {
    std::string fixture, work_dir, out;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--fixture", o->fixture)->required();
  sub->add_option("--work-dir", o->work_dir, "Scratch directory (default: under the temp dir)");
  sub->add_option("--out", o->out, "Report file");
  return [o](Context& ctx) {
    fs::path work = o->work_dir;
    if (work.empty()) {
      const char* env = std::getenv("ABXKIT_TMPDIR");
      work = (env && *env ? fs::path(env) : fs::temp_directory_path()) /
             ("abxkit-smoke-" + std::to_string(::getpid()));
    }
    auto runner = [&](const std::vector<std::string>& argv) {
      return run(argv, ctx.out(), ctx.err());
    };
    SmokeReport report = smoke_pipeline(o->fixture, work, runner);
    std::string body = report.render();
    if (!o->out.empty()) ctx.emit(o->out, {"smoke", 0, {}}, body);
    ctx.out() << body;
    if (!report.passed())
      throw ValidationError("smoke check failed: " + report.first_failure());
  };
}

/// Exit status: 0 success, 1 error (reported as one `abxkit: error[kind]:`
/// line), 2 usage error.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ABX discrimination toolkit", "abxkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough(false);
  std::vector<std::pair<CLI::App*, Action>> actions;
  auto add = [&](Action (*make)(CLI::App&)) {
    Action a = make(app);
    actions.emplace_back(app.get_subcommands({}).back(), std::move(a));
  };
  add(add_extract_mfcc);
  add(add_score);
  add(add_accuracy);
  add(add_scatter);
  add(add_fit);
  add(add_compare);
  add(add_mine);
  add(add_make_items);
  add(add_assemble);
  add(add_counterbalance);
  add(add_check_lists);
  add(add_ingest);
  add(add_validate);
  add(add_smoke);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::Success&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "abxkit: usage: " << e.what() << '\n';
    return 2;
  }

  Context ctx(out, err);
  try {
    for (auto& [sub, action] : actions)
      if (sub->parsed()) action(ctx);
  } catch (const CLI::ParseError& e) {
    err << "abxkit: usage: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "abxkit: error[" << to_string(e.kind()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "abxkit: error[io]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "abxkit: error[internal]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace abxkit::cli
