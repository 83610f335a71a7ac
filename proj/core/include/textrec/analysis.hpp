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

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "textrec/augment.hpp"
#include "textrec/encoder.hpp"

namespace textrec {

/// Case-insensitive token multiset comparison between two responses.
struct TokenDiff {
  std::vector<std::string> base_tokens;
  std::vector<std::string> variant_tokens;
  std::vector<std::string> added;    // in variant, absent from base
  std::vector<std::string> removed;  // in base, absent from variant
};

TokenDiff token_diff(const std::string& base, const std::string& variant);

/// Keeps only the rec_response tokens that also occur in base_response,
/// preserving punctuation around kept words. Words unique to the
/// recommendation-driven response are masked out.
std::string build_mask_variant(const std::string& base_response,
                               const std::string& rec_response);

/// Ordered, deduplicated keyword/phrase list for one domain.
struct KeywordList {
  std::string domain;
  std::vector<std::string> words;
};

KeywordList load_keyword_list(const std::string& path,
                              const std::string& domain = "");
void save_keyword_list(const std::string& path, const KeywordList& list);

/// Appends (in list order, deduplicated) the keywords that occur in
/// rec_response and are not already present in base_response. Multi-word
/// keywords match only as adjacent token runs.
std::string build_keyword_variant(const std::string& base_response,
                                  const std::string& rec_response,
                                  const KeywordList& keywords);

struct KeywordCandidate {
  std::string phrase;  // unigram or space-joined bigram
  std::size_t frequency = 0;
};

inline constexpr std::size_t kDefaultKeywordMinFreq = 5;

/// Stopword-filtered unigram/bigram counts over a response corpus, sorted
/// by (-frequency, phrase). Human curation of the result happens outside
/// the tool.
std::vector<KeywordCandidate> extract_keywords(
    const std::vector<std::string>& corpus,
    std::size_t min_freq = kDefaultKeywordMinFreq);

/// Pluggable part-of-speech oracle; only adjective membership is needed.
class PosTagger {
 public:
  virtual ~PosTagger() = default;
  virtual bool is_adjective(const std::string& lowercased_token) const = 0;
};

/// Closed-lexicon tagger, deterministic for tests and desk-scale corpora.
class LexiconTagger : public PosTagger {
 public:
  explicit LexiconTagger(std::set<std::string> adjectives)
      : adjectives_(std::move(adjectives)) {}
  bool is_adjective(const std::string& token) const override {
    return adjectives_.count(token) > 0;
  }

 private:
  std::set<std::string> adjectives_;
};

/// (adjectives(augmented) - adjectives(original)) / words(original).
/// EmptyOriginalError when the original has no words.
double adjective_increase(const std::string& original,
                          const std::string& augmented,
                          const PosTagger& tagger);

double cosine_similarity(const std::vector<float>& a,
                         const std::vector<float>& b);

struct SimilarityReport {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t count = 0;
};

/// Cosine between canonical and variant responses of one strategy over a
/// sample of items, looked up in the augmentation cache.
/// MissingResponseError if either response is absent for an item.
SimilarityReport prompt_variant_similarity(
    const TextEncoder& encoder, const std::vector<std::string>& item_ids,
    const std::string& strategy, const AugmentationCache& cache,
    const std::string& model_tag, const std::string& params_hash,
    const std::string& variant_tag);

}  // namespace textrec
