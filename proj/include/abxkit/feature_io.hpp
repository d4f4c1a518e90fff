// abxkit/feature_io.hpp

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

// Feature files: one stimulus per file, extension ".feat".
//
//   stimulus_id=<id>
//   dim=<D>
//   <D space-separated reals>     one line per frame
//
// Lines starting with '#' before the stimulus_id line are ignored.

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "abxkit/error.hpp"
#include "abxkit/text.hpp"

namespace abxkit {

enum class FeatureMode { general, probability };

inline std::string_view to_string(FeatureMode mode) {
  return mode == FeatureMode::general ? "general" : "probability";
}

// Replacement value for exact zeros in probability frames.
inline constexpr double kProbabilityFloor = 1e-10;
inline constexpr double kProbabilitySumTolerance = 1e-6;
// How far a raw (pre-flooring) row may stray from summing to one.
inline constexpr double kRawProbabilitySumTolerance = 1e-3;

/// Replaces exact zeros with kProbabilityFloor, then rescales the frame to
/// sum to one. Negative entries are a precondition violation.
inline void floor_probabilities(std::span<double> frame) {
  double sum = 0.0;
  for (double& v : frame) {
    if (v < 0.0) throw DomainError("negative probability");
    if (v == 0.0) v = kProbabilityFloor;
    sum += v;
  }
  for (double& v : frame) v /= sum;
}

/// A stimulus's model representation: num_frames() x dim() reals stored
/// row-major. Construction validates every invariant, so any live
/// instance is well formed.
class FeatureSequence {
 public:
  FeatureSequence(std::string stimulus_id, std::size_t dim,
                  std::vector<double> values,
                  FeatureMode mode = FeatureMode::general)
      : id_(std::move(stimulus_id)), dim_(dim), values_(std::move(values)),
        mode_(mode) {
    if (dim_ == 0) throw ValidationError("feature dimension must be positive");
    if (values_.empty()) throw ValidationError("feature sequence '" + id_ + "' is empty");
    if (values_.size() % dim_ != 0)
      throw ValidationError("feature sequence '" + id_ + "' has a partial frame");
    for (double v : values_)
      if (!std::isfinite(v))
        throw ValidationError("feature sequence '" + id_ + "' has a non-finite value");
    if (mode_ == FeatureMode::probability) {
      for (std::size_t t = 0; t < num_frames(); ++t) {
        double sum = 0.0;
        for (double v : frame(t)) {
          if (v < 0.0)
            throw ValidationError("probability frame " + std::to_string(t) +
                                  " of '" + id_ + "' has a negative entry");
          sum += v;
        }
        if (std::abs(sum - 1.0) > kProbabilitySumTolerance)
          throw ValidationError("probability frame " + std::to_string(t) +
                                " of '" + id_ + "' does not sum to 1");
      }
    }
  }

  const std::string& stimulus_id() const noexcept { return id_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t num_frames() const noexcept { return values_.size() / dim_; }
  FeatureMode mode() const noexcept { return mode_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> frame(std::size_t t) const noexcept {
    return std::span<const double>(values_).subspan(t * dim_, dim_);
  }

  /// Same content under another stimulus ID.
  FeatureSequence renamed(std::string id) const {
    FeatureSequence copy = *this;
    copy.id_ = std::move(id);
    return copy;
  }

 private:
  std::string id_;
  std::size_t dim_;
  std::vector<double> values_;
  FeatureMode mode_;
};

namespace detail {

inline std::string_view header_value(const Line& line, std::string_view key) {
  std::string_view text = line.text;
  if (text.size() <= key.size() || text.substr(0, key.size()) != key ||
      text[key.size()] != '=')
    throw ParseError(line.number, "expected '" + std::string(key) + "=<value>'");
  return text.substr(key.size() + 1);
}

}  // namespace detail

/// Parses one feature file. In probability mode zero entries are floored
/// and every frame renormalized.
inline FeatureSequence read_feature_file(std::string_view content,
                                         FeatureMode mode = FeatureMode::general) {
  std::vector<Line> lines = split_lines(content);
  std::size_t at = 0;
  while (at < lines.size() && !lines[at].text.empty() && lines[at].text.front() == '#')
    ++at;
  for (std::size_t i = at; i < lines.size(); ++i)
    if (!lines[i].text.empty() && lines[i].text.back() == '\r')
      throw ParseError(lines[i].number, "CR line ending (LF required)");
  if (at >= lines.size()) throw ParseError(0, "missing 'stimulus_id=' header");
  std::string id(detail::header_value(lines[at], "stimulus_id"));
  if (!is_plain_token(id)) throw ParseError(lines[at].number, "invalid stimulus_id");
  ++at;
  if (at >= lines.size()) throw ParseError(0, "missing 'dim=' header");
  auto dim = parse_int(detail::header_value(lines[at], "dim"));
  if (!dim || *dim <= 0) throw ParseError(lines[at].number, "dim must be a positive integer");
  const auto width = static_cast<std::size_t>(*dim);
  ++at;
  if (at >= lines.size()) throw ParseError(0, "empty sequence: no frames after header");

  std::vector<double> values;
  values.reserve((lines.size() - at) * width);
  std::vector<double> row(width);
  for (; at < lines.size(); ++at) {
    const Line& line = lines[at];
    auto fields = split_fields(line.text);
    if (fields.size() != width)
      throw ParseError(line.number, "arity " + std::to_string(fields.size()) +
                                        ", expected " + std::to_string(width));
    double sum = 0.0;
    for (std::size_t k = 0; k < width; ++k) {
      auto v = parse_real(fields[k]);
      if (!v)
        throw ParseError(line.number, "not a finite real: '" + std::string(fields[k]) + "'");
      if (mode == FeatureMode::probability && *v < 0.0)
        throw ParseError(line.number, "negative entry in probability row");
      row[k] = *v;
      sum += *v;
    }
    if (mode == FeatureMode::probability) {
      if (std::abs(sum - 1.0) > kRawProbabilitySumTolerance)
        throw ParseError(line.number, "probability row sums to " + format_real(sum));
      floor_probabilities(row);
    }
    values.insert(values.end(), row.begin(), row.end());
  }
  return FeatureSequence(std::move(id), width, std::move(values), mode);
}

inline std::string write_feature_file(const FeatureSequence& seq) {
  std::string out = "stimulus_id=" + seq.stimulus_id() + "\ndim=" +
                    std::to_string(seq.dim()) + "\n";
  for (std::size_t t = 0; t < seq.num_frames(); ++t) {
    auto f = seq.frame(t);
    for (std::size_t k = 0; k < f.size(); ++k) {
      if (k) out += ' ';
      out += format_real(f[k]);
    }
    out += '\n';
  }
  return out;
}

/// Loads `path` and checks that its stem equals the header's stimulus_id.
inline FeatureSequence load_feature_file(const std::filesystem::path& path,
                                         FeatureMode mode = FeatureMode::general) {
  std::string content = read_file(path);
  FeatureSequence seq = [&] {
    try {
      return read_feature_file(content, mode);
    } catch (const ParseError& e) {
      throw e.with_source(path.filename().string());
    }
  }();
  if (path.stem().string() != seq.stimulus_id())
    throw ValidationError("file '" + path.filename().string() +
                          "' declares stimulus_id '" + seq.stimulus_id() + "'");
  return seq;
}

}  // namespace abxkit
