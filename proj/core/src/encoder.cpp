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

#include "textrec/encoder.hpp"

#include <cmath>
#include <sstream>

#include "textrec/digest.hpp"
#include "textrec/errors.hpp"
#include "textrec/rng.hpp"
#include "textrec/text.hpp"

namespace textrec {

std::vector<float> encode_texts(const TextEncoder& encoder,
                                const std::vector<std::string>& texts) {
  std::vector<float> out;
  out.reserve(texts.size() * encoder.dim());
  for (const auto& t : texts) {
    const auto row = encoder.encode(t);
    if (row.size() != encoder.dim()) {
      throw EncoderError("encoder returned a row of dimension " +
                         std::to_string(row.size()) + ", expected " +
                         std::to_string(encoder.dim()));
    }
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

namespace {

void normalize(std::vector<float>& v) {
  double norm = 0.0;
  for (float x : v) norm += static_cast<double>(x) * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) return;
  for (float& x : v) x = static_cast<float>(x / norm);
}

std::vector<float> unit_from_seed(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<float> v(dim);
  for (auto& x : v) x = static_cast<float>(rng.normal());
  normalize(v);
  return v;
}

}  // namespace

HashEncoder::HashEncoder(std::size_t dim, std::uint64_t seed,
                         SignalLexicon lexicon, float lexicon_bump)
    : dim_(dim),
      seed_(seed),
      lexicon_tokens_(lexicon.all_tokens()),
      lexicon_bump_(lexicon_bump) {
  if (dim_ == 0) throw EncoderError("encoder dimension must be positive");
}

std::string HashEncoder::identity_tag() const {
  std::ostringstream ss;
  ss << "hash-d" << dim_ << "-s" << seed_ << "-b" << lexicon_bump_;
  for (const auto& t : lexicon_tokens_) ss << "," << t;
  return "hash/" + content_digest(ss.str()).substr(0, 8);
}

std::vector<float> HashEncoder::token_direction(const std::string& token) const {
  return unit_from_seed(dim_, splitmix64(fnv1a64("lexicon:" + token) ^ seed_));
}

std::vector<float> HashEncoder::encode(std::string_view text) const {
  if (text.empty()) {
    std::vector<float> sentinel(dim_, 0.0f);
    sentinel[0] = 1.0f;
    return sentinel;
  }
  std::vector<float> v =
      unit_from_seed(dim_, splitmix64(fnv1a64(text) ^ seed_));
  if (!lexicon_tokens_.empty()) {
    const auto present = token_set(text);
    bool bumped = false;
    for (const auto& token : lexicon_tokens_) {
      if (!present.count(token)) continue;
      const auto dir = token_direction(token);
      for (std::size_t i = 0; i < dim_; ++i) v[i] += lexicon_bump_ * dir[i];
      bumped = true;
    }
    if (bumped) normalize(v);
  }
  return v;
}

std::unique_ptr<TextEncoder> make_encoder(const std::string& kind,
                                          std::size_t dim, std::uint64_t seed,
                                          const SignalLexicon& lexicon,
                                          float lexicon_bump) {
  if (kind == "hash") {
    return std::make_unique<HashEncoder>(dim, seed, lexicon, lexicon_bump);
  }
  throw ConfigError("unknown encoder kind: " + kind);
}

}  // namespace textrec
