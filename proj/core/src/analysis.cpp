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

#include "textrec/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_set>

#include "textrec/errors.hpp"
#include "textrec/text.hpp"

namespace textrec {

TokenDiff token_diff(const std::string& base, const std::string& variant) {
  TokenDiff out;
  out.base_tokens = tokenize(base);
  out.variant_tokens = tokenize(variant);
  std::unordered_set<std::string> base_set(out.base_tokens.begin(),
                                           out.base_tokens.end());
  std::unordered_set<std::string> variant_set(out.variant_tokens.begin(),
                                              out.variant_tokens.end());
  std::unordered_set<std::string> emitted;
  for (const auto& t : out.variant_tokens) {
    if (!base_set.count(t) && emitted.insert(t).second) out.added.push_back(t);
  }
  emitted.clear();
  for (const auto& t : out.base_tokens) {
    if (!variant_set.count(t) && emitted.insert(t).second) {
      out.removed.push_back(t);
    }
  }
  return out;
}

std::string build_mask_variant(const std::string& base_response,
                               const std::string& rec_response) {
  const auto base_set = token_set(base_response);
  const auto spans = word_spans(rec_response);
  std::string out;
  bool kept_any = false;
  bool dropped_leading = false;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (base_set.count(lowercase_ascii(spans[i].word))) {
      out += spans[i].separator;
      out += spans[i].word;
      kept_any = true;
    } else if (!kept_any) {
      dropped_leading = true;
    }
  }
  if (!kept_any) return "";
  out += trailing_separator(rec_response);
  if (dropped_leading) {
    const auto first = out.find_first_not_of(" \t");
    out = first == std::string::npos ? "" : out.substr(first);
  }
  return out;
}

KeywordList load_keyword_list(const std::string& path,
                              const std::string& domain) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open keyword list: " + path);
  KeywordList list;
  list.domain = domain;
  std::string line;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const std::string word = lowercase_ascii(line);
    if (seen.insert(word).second) list.words.push_back(word);
  }
  return list;
}

void save_keyword_list(const std::string& path, const KeywordList& list) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write keyword list: " + path);
  for (const auto& w : list.words) out << w << "\n";
}

namespace {

// Adjacent-run (phrase-aware) containment of `phrase` in `tokens`.
bool contains_phrase(const std::vector<std::string>& tokens,
                     const std::vector<std::string>& phrase) {
  if (phrase.empty() || tokens.size() < phrase.size()) return false;
  for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < phrase.size(); ++j) {
      if (tokens[i + j] != phrase[j]) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

}  // namespace

std::string build_keyword_variant(const std::string& base_response,
                                  const std::string& rec_response,
                                  const KeywordList& keywords) {
  const auto rec_tokens = tokenize(rec_response);
  const auto base_tokens = tokenize(base_response);
  std::vector<std::string> to_append;
  std::unordered_set<std::string> emitted;
  for (const auto& keyword : keywords.words) {
    const auto phrase = tokenize(keyword);
    if (phrase.empty()) continue;
    if (!contains_phrase(rec_tokens, phrase)) continue;
    if (contains_phrase(base_tokens, phrase)) continue;  // idempotence
    if (!emitted.insert(keyword).second) continue;
    to_append.push_back(keyword);
  }
  if (to_append.empty()) return base_response;
  std::string out = base_response;
  for (const auto& k : to_append) {
    out += ' ';
    out += k;
  }
  return out;
}

std::vector<KeywordCandidate> extract_keywords(
    const std::vector<std::string>& corpus, std::size_t min_freq) {
  std::map<std::string, std::size_t> counts;
  for (const auto& doc : corpus) {
    std::vector<std::string> filtered;
    for (auto& t : tokenize(doc)) {
      if (!is_stopword(t)) filtered.push_back(std::move(t));
    }
    for (std::size_t i = 0; i < filtered.size(); ++i) {
      ++counts[filtered[i]];
      if (i + 1 < filtered.size()) {
        ++counts[filtered[i] + " " + filtered[i + 1]];
      }
    }
  }
  std::vector<KeywordCandidate> out;
  for (const auto& [phrase, freq] : counts) {
    if (freq >= min_freq) out.push_back(KeywordCandidate{phrase, freq});
  }
  std::sort(out.begin(), out.end(),
            [](const KeywordCandidate& a, const KeywordCandidate& b) {
              if (a.frequency != b.frequency) return a.frequency > b.frequency;
              return a.phrase < b.phrase;
            });
  return out;
}

double adjective_increase(const std::string& original,
                          const std::string& augmented,
                          const PosTagger& tagger) {
  const auto original_tokens = tokenize(original);
  if (original_tokens.empty()) {
    throw EmptyOriginalError("adjective increase needs a non-empty original");
  }
  auto count_adjectives = [&tagger](const std::vector<std::string>& tokens) {
    std::size_t n = 0;
    for (const auto& t : tokens) n += tagger.is_adjective(t) ? 1 : 0;
    return n;
  };
  const auto adj_original = count_adjectives(original_tokens);
  const auto adj_augmented = count_adjectives(tokenize(augmented));
  return (static_cast<double>(adj_augmented) -
          static_cast<double>(adj_original)) /
         static_cast<double>(original_tokens.size());
}

double cosine_similarity(const std::vector<float>& a,
                         const std::vector<float>& b) {
  if (a.size() != b.size()) {
    throw LengthMismatchError("cosine over mismatched dimensions");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

SimilarityReport prompt_variant_similarity(
    const TextEncoder& encoder, const std::vector<std::string>& item_ids,
    const std::string& strategy, const AugmentationCache& cache,
    const std::string& model_tag, const std::string& params_hash,
    const std::string& variant_tag) {
  std::vector<double> values;
  for (const auto& id : item_ids) {
    const auto* canonical = cache.find(id, strategy, "", model_tag, params_hash);
    const auto* variant =
        cache.find(id, strategy, variant_tag, model_tag, params_hash);
    if (!canonical || !variant) {
      throw MissingResponseError("item " + id + " lacks a cached " + strategy +
                                 (canonical ? "/" + variant_tag : "") +
                                 " response");
    }
    values.push_back(cosine_similarity(encoder.encode(canonical->response),
                                       encoder.encode(variant->response)));
  }
  SimilarityReport report;
  report.count = values.size();
  if (values.empty()) return report;
  for (double v : values) report.mean += v;
  report.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - report.mean) * (v - report.mean);
    report.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return report;
}

}  // namespace textrec
