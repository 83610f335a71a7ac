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

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace textrec {

struct ItemRecord {
  std::string item_id;
  std::string description;
  // Optional string-valued metadata; "genres" holds a pipe-separated list,
  // "title" the raw title for corpora that ship no description.
  std::map<std::string, std::string> metadata;

  /// Pipe-separated "genres" metadata split into individual labels.
  std::vector<std::string> genres() const;
};

struct Interaction {
  std::string user_id;
  std::string item_id;
  int label = 1;                 // implicit feedback: 1 observed, 0 sampled
  std::int64_t timestamp = -1;   // seconds; -1 when absent

  friend bool operator==(const Interaction& a, const Interaction& b) {
    return a.user_id == b.user_id && a.item_id == b.item_id &&
           a.label == b.label && a.timestamp == b.timestamp;
  }
};

/// Raw rating row as found in interaction files before implicit conversion.
struct RatingRecord {
  std::string user_id;
  std::string item_id;
  double rating = 0.0;
  std::int64_t timestamp = -1;
};

struct DatasetSplit {
  std::vector<Interaction> train;
  std::vector<Interaction> validation;
  std::vector<Interaction> test;
  std::uint64_t seed = 0;
  std::array<double, 3> ratio{0.8, 0.1, 0.1};
};

/// One user's ranked-evaluation pool: their positives in a split part plus
/// n sampled never-interacted items.
struct EvalCandidateSet {
  std::string user_id;
  std::vector<std::string> positives;
  std::vector<std::string> negatives;
};

struct EvalCandidates {
  std::vector<EvalCandidateSet> validation;  // sorted by user_id
  std::vector<EvalCandidateSet> test;        // sorted by user_id
};

}  // namespace textrec
