/*
 * Copyright 2026 The textrec Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace textrec {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Data ingestion.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DuplicateIdError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class NotEnoughItemsError : public Error {
 public:
  using Error::Error;
};

// Prompt rendering.
class MissingNeighborsError : public Error {
 public:
  using Error::Error;
};

class EmptyDescriptionError : public Error {
 public:
  using Error::Error;
};

class EmptyTitleError : public Error {
 public:
  using Error::Error;
};

class BadTemplateError : public Error {
 public:
  using Error::Error;
};

// Completion providers.
class ProviderError : public Error {
 public:
  enum class Kind { transient, fatal };
  ProviderError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }
  bool transient() const { return kind_ == Kind::transient; }

 private:
  Kind kind_;
};

class RateLimitedError : public ProviderError {
 public:
  explicit RateLimitedError(const std::string& what)
      : ProviderError(Kind::transient, what) {}
};

class TimeoutError : public ProviderError {
 public:
  explicit TimeoutError(const std::string& what)
      : ProviderError(Kind::transient, what) {}
};

// Embedding and fusion.
class EncoderError : public Error {
 public:
  using Error::Error;
};

class MissingComponentError : public Error {
 public:
  using Error::Error;
};

// Model.
class UnknownUserError : public Error {
 public:
  using Error::Error;
};

class DimMismatchError : public Error {
 public:
  using Error::Error;
};

class LengthMismatchError : public Error {
 public:
  using Error::Error;
};

class DivergedError : public Error {
 public:
  using Error::Error;
};

// Evaluation and analysis.
class NoPositivesError : public Error {
 public:
  using Error::Error;
};

class MissingResponseError : public Error {
 public:
  using Error::Error;
};

class EmptyOriginalError : public Error {
 public:
  using Error::Error;
};

// Configuration / pipeline plumbing.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class StaleArtifactError : public Error {
 public:
  using Error::Error;
};

}  // namespace textrec
