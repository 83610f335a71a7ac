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

#include "textrec/text.hpp"

#include <array>

namespace textrec {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_byte(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_word_byte(static_cast<unsigned char>(text[j]))) {
      ++j;
    }
    out.push_back(lowercase_ascii(text.substr(i, j - i)));
    i = j;
  }
  return out;
}

std::unordered_set<std::string> token_set(std::string_view text) {
  std::unordered_set<std::string> out;
  for (auto& t : tokenize(text)) out.insert(std::move(t));
  return out;
}

std::vector<WordSpan> word_spans(std::string_view text) {
  std::vector<WordSpan> out;
  std::size_t i = 0;
  std::size_t sep_start = 0;
  while (i < text.size()) {
    if (!is_word_byte(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_word_byte(static_cast<unsigned char>(text[j]))) {
      ++j;
    }
    out.push_back(WordSpan{std::string(text.substr(sep_start, i - sep_start)),
                           std::string(text.substr(i, j - i))});
    sep_start = j;
    i = j;
  }
  return out;
}

std::string trailing_separator(std::string_view text) {
  std::size_t end = text.size();
  while (end > 0 && !is_word_byte(static_cast<unsigned char>(text[end - 1]))) {
    --end;
  }
  return std::string(text.substr(end));
}

namespace {
// Classic English stopword list (NLTK-sized subset).
const std::array<std::string_view, 127> kStopwords = {
    "a",       "about",  "above",   "after",   "again",  "against", "all",
    "am",      "an",     "and",     "any",     "are",    "as",      "at",
    "be",      "because", "been",   "before",  "being",  "below",   "between",
    "both",    "but",    "by",      "can",     "cannot", "could",   "did",
    "do",      "does",   "doing",   "down",    "during", "each",    "few",
    "for",     "from",   "further", "had",     "has",    "have",    "having",
    "he",      "her",    "here",    "hers",    "herself", "him",    "himself",
    "his",     "how",    "i",       "if",      "in",     "into",    "is",
    "it",      "its",    "itself",  "just",    "me",     "more",    "most",
    "my",      "myself", "no",      "nor",     "not",    "now",     "of",
    "off",     "on",     "once",    "only",    "or",     "other",   "our",
    "ours",    "ourselves", "out",  "over",    "own",    "same",    "she",
    "should",  "so",     "some",    "such",    "than",   "that",    "the",
    "their",   "theirs", "them",    "themselves", "then", "there",  "these",
    "they",    "this",   "those",   "through", "to",     "too",     "under",
    "until",   "up",     "very",    "was",     "we",     "were",    "what",
    "when",    "where",  "which",   "while",   "who",    "whom",    "why",
    "will",    "with",   "would",   "you",     "your",   "yours",   "yourself",
    "yourselves"};
}  // namespace

bool is_stopword(const std::string& lowercased_token) {
  static const std::unordered_set<std::string_view> set(kStopwords.begin(),
                                                        kStopwords.end());
  return set.count(lowercased_token) > 0;
}

}  // namespace textrec
