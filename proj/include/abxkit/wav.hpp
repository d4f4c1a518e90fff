// abxkit/wav.hpp

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

// RIFF/WAVE, 16-bit PCM, mono only.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "abxkit/error.hpp"

namespace abxkit {

inline constexpr int kFeatureSampleRate = 16000;

struct Waveform {
  std::vector<double> samples;  // in [-1, 1]
  int sample_rate = kFeatureSampleRate;

  double duration() const {
    return static_cast<double>(samples.size()) / static_cast<double>(sample_rate);
  }
};

class WavError : public Error {
 public:
  explicit WavError(const std::string& message) : Error(ErrorKind::format, "wav: " + message) {}
};

namespace detail {

inline std::uint32_t le32(std::string_view b, std::size_t at) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(b[at])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 3])) << 24;
}

inline std::uint16_t le16(std::string_view b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                    static_cast<unsigned char>(b[at + 1]) << 8);
}

inline void put32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out += static_cast<char>((v >> (8 * k)) & 0xff);
}

inline void put16(std::string& out, std::uint16_t v) {
  out += static_cast<char>(v & 0xff);
  out += static_cast<char>((v >> 8) & 0xff);
}

}  // namespace detail

/// Decodes a mono 16-bit PCM WAV; samples are scaled by 1/32768. Unknown
/// chunks are skipped.
inline Waveform read_wav(std::string_view bytes) {
  using detail::le16;
  using detail::le32;
  if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" || bytes.substr(8, 4) != "WAVE")
    throw WavError("not a RIFF/WAVE file");
  bool have_fmt = false;
  Waveform w;
  std::size_t at = 12;
  while (at + 8 <= bytes.size()) {
    std::string_view id = bytes.substr(at, 4);
    std::uint32_t size = le32(bytes, at + 4);
    at += 8;
    if (size > bytes.size() - at)
      throw WavError("truncated '" + std::string(id) + "' chunk");
    if (id == "fmt ") {
      if (size < 16) throw WavError("fmt chunk too small");
      std::uint16_t format = le16(bytes, at);
      std::uint16_t channels = le16(bytes, at + 2);
      std::uint32_t rate = le32(bytes, at + 4);
      std::uint16_t bits = le16(bytes, at + 14);
      if (format != 1) throw WavError("non-PCM format tag " + std::to_string(format));
      if (channels != 1)
        throw WavError(std::to_string(channels) + " channels, expected mono");
      if (bits != 16) throw WavError(std::to_string(bits) + "-bit samples, expected 16");
      if (rate == 0 || rate > 1'000'000) throw WavError("implausible sample rate");
      w.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw WavError("data chunk before fmt chunk");
      if (size % 2) throw WavError("odd data chunk size");
      w.samples.resize(size / 2);
      for (std::size_t k = 0; k < w.samples.size(); ++k)
        w.samples[k] = static_cast<std::int16_t>(le16(bytes, at + 2 * k)) / 32768.0;
      return w;
    }
    at += size + (size & 1);
  }
  throw WavError(have_fmt ? "missing data chunk" : "missing fmt chunk");
}

/// Encodes as 16-bit PCM mono (round to nearest, clipped). A non-empty
/// `comment` is stored in a LIST/INFO ICMT chunk.
inline std::string write_wav(const Waveform& w, std::string_view comment = {}) {
  using detail::put16;
  using detail::put32;
  std::string info;
  if (!comment.empty()) {
    std::string text(comment);
    text += '\0';
    if (text.size() & 1) text += '\0';
    info = "INFO";
    info += "ICMT";
    put32(info, static_cast<std::uint32_t>(text.size()));
    info += text;
  }
  const auto data_size = static_cast<std::uint32_t>(2 * w.samples.size());
  std::string out = "RIFF";
  std::uint32_t riff_size = 4 + (8 + 16) + (8 + data_size);
  if (!info.empty()) riff_size += 8 + static_cast<std::uint32_t>(info.size());
  put32(out, riff_size);
  out += "WAVE";
  out += "fmt ";
  put32(out, 16);
  put16(out, 1);
  put16(out, 1);
  put32(out, static_cast<std::uint32_t>(w.sample_rate));
  put32(out, static_cast<std::uint32_t>(w.sample_rate) * 2);
  put16(out, 2);
  put16(out, 16);
  if (!info.empty()) {
    out += "LIST";
    put32(out, static_cast<std::uint32_t>(info.size()));
    out += info;
  }
  out += "data";
  put32(out, data_size);
  for (double s : w.samples) {
    double scaled = std::round(s * 32768.0);
    auto v = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    put16(out, static_cast<std::uint16_t>(v));
  }
  return out;
}

}  // namespace abxkit
