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

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "textrec/augment.hpp"

namespace textrec {

/// Frozen sentence encoder: same text always maps to the same vector, and
/// the output dimension never changes. Backends are pluggable; training
/// never touches encoder parameters.
class TextEncoder {
 public:
  virtual ~TextEncoder() = default;
  virtual std::size_t dim() const = 0;
  virtual std::string identity_tag() const = 0;
  virtual std::vector<float> encode(std::string_view text) const = 0;
};

/// Row-major encoding of a batch; row i encodes texts[i].
std::vector<float> encode_texts(const TextEncoder& encoder,
                                const std::vector<std::string>& texts);

/// Deterministic test encoder: a seeded hash of the text selects a
/// pseudo-random unit vector. Every signal-lexicon token present in the
/// text additionally pulls the vector toward a fixed per-token direction
/// before renormalization, which makes planted tokens linearly recoverable.
/// The empty string maps to the fixed sentinel e_0.
class HashEncoder : public TextEncoder {
 public:
  HashEncoder(std::size_t dim, std::uint64_t seed,
              SignalLexicon lexicon = {}, float lexicon_bump = 1.0f);

  std::size_t dim() const override { return dim_; }
  std::string identity_tag() const override;
  std::vector<float> encode(std::string_view text) const override;

 private:
  std::vector<float> token_direction(const std::string& token) const;

  std::size_t dim_;
  std::uint64_t seed_;
  std::vector<std::string> lexicon_tokens_;
  float lexicon_bump_;
};

std::unique_ptr<TextEncoder> make_encoder(const std::string& kind,
                                          std::size_t dim, std::uint64_t seed,
                                          const SignalLexicon& lexicon,
                                          float lexicon_bump);

}  // namespace textrec
