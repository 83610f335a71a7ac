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

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace textrec {

// Word segmentation rules shared by every text-level operation (masking,
// keyword matching, frequency counting, the mock provider and encoder):
//   * a word is a maximal run of ASCII alphanumerics or non-ASCII bytes
//     (UTF-8 multibyte sequences never split a word);
//   * everything else is a separator;
//   * ASCII letters are lowercased, other bytes pass through unchanged.

inline bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c >= 0x80;
}

inline std::string lowercase_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

/// Lowercased word tokens in text order.
std::vector<std::string> tokenize(std::string_view text);

/// Token set (case-insensitive membership).
std::unordered_set<std::string> token_set(std::string_view text);

/// Word spans of `text`: (separator preceding the word, word). The
/// concatenation of all spans plus trailing_separator() reconstructs the
/// original text byte for byte.
struct WordSpan {
  std::string separator;  // raw bytes preceding the word
  std::string word;       // raw (not lowercased) word bytes
};
std::vector<WordSpan> word_spans(std::string_view text);
std::string trailing_separator(std::string_view text);

bool is_stopword(const std::string& lowercased_token);

}  // namespace textrec
