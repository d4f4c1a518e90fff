// abxkit/error.hpp

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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace abxkit {

enum class ErrorKind { format, validation, io, domain, infeasible };

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::format: return "format";
    case ErrorKind::validation: return "validation";
    case ErrorKind::io: return "io";
    case ErrorKind::domain: return "domain";
    case ErrorKind::infeasible: return "infeasible";
  }
  return "unknown";
}

// Base of every error thrown by the library. The kind is what the CLI
// prints as its machine-readable prefix.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Malformed input text. line() is 1-based; 0 means "whole input".
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& detail, std::string source = {})
      : Error(ErrorKind::format, compose(source, line, detail)),
        line_(line), detail_(detail), source_(std::move(source)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }
  const std::string& source() const noexcept { return source_; }

  /// Same error attributed to a named input (usually a file name).
  ParseError with_source(std::string source) const {
    return ParseError(line_, detail_, std::move(source));
  }

 private:
  static std::string compose(const std::string& source, std::size_t line,
                             const std::string& detail) {
    std::string out;
    if (!source.empty()) out += source + ": ";
    if (line) out += "line " + std::to_string(line) + ": ";
    return out + detail;
  }

  std::size_t line_;
  std::string detail_;
  std::string source_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error(ErrorKind::validation, message) {}
};

// Numerical precondition violated (zero vector, dimension mismatch, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message)
      : Error(ErrorKind::domain, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(ErrorKind::io, message) {}
};

}  // namespace abxkit
