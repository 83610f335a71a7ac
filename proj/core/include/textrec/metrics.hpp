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

#include <functional>
#include <string>
#include <vector>

#include "textrec/types.hpp"

namespace textrec {

inline constexpr std::size_t kDefaultK = 10;

/// Scoring function over (user, item) pairs; must be total on every pair
/// it is asked about.
using Scorer = std::function<double(const std::string& user_id,
                                    const std::string& item_id)>;

struct RankedItem {
  std::string item_id;
  double score = 0.0;
  bool relevant = false;
};

/// Candidates ordered by descending score, ties broken by ascending item id.
struct RankedList {
  std::string user_id;
  std::vector<RankedItem> items;
};

RankedList rank_candidates(const Scorer& scorer, const EvalCandidateSet& set);

double precision_at_k(const RankedList& ranked, std::size_t k);
/// Requires at least one relevant item (NoPositivesError otherwise).
double recall_at_k(const RankedList& ranked, std::size_t k);
/// Binary gains with log2(rank + 1) discount, normalized by the ideal
/// prefix. Requires at least one relevant item.
double ndcg_at_k(const RankedList& ranked, std::size_t k);

struct MacroMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double ndcg = 0.0;
  std::size_t users = 0;
};

/// Unweighted per-user average of the three metrics over all candidate
/// sets. Scorer errors propagate annotated with the user id.
MacroMetrics evaluate_model(const Scorer& scorer,
                            const std::vector<EvalCandidateSet>& candidates,
                            std::size_t k = kDefaultK);

}  // namespace textrec
