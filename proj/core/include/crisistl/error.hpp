// Copyright 2026 The crisistl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
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

namespace crisistl {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data (files, records, config). `line()` is 1-based, or 0
/// when the error is not tied to a line.
class DataError : public Error {
 public:
  explicit DataError(const std::string& message, std::size_t line = 0)
      : Error(line == 0 ? message
                        : "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A value violates a documented invariant. `field()` names the offending
/// field when there is one.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& message, std::string field = {})
      : Error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)),
        message_(message) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& bare_message() const noexcept { return message_; }

 private:
  std::string field_;
  std::string message_;
};

/// A pipeline stage failed; carries the stage name and the tweet id.
class StageError : public Error {
 public:
  StageError(std::string stage, std::string tweet_id, const std::string& what)
      : Error(stage + " failed on tweet " + tweet_id + ": " + what),
        stage_(std::move(stage)),
        tweet_id_(std::move(tweet_id)) {}

  const std::string& stage() const noexcept { return stage_; }
  const std::string& tweet_id() const noexcept { return tweet_id_; }

 private:
  std::string stage_;
  std::string tweet_id_;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// Optimistic-concurrency or single-assignment violation.
class ConflictError : public Error {
 public:
  using Error::Error;
};

}  // namespace crisistl
