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

#include "textrec/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "textrec/errors.hpp"

namespace textrec {

RankedList rank_candidates(const Scorer& scorer, const EvalCandidateSet& set) {
  RankedList out;
  out.user_id = set.user_id;
  out.items.reserve(set.positives.size() + set.negatives.size());
  try {
    for (const auto& id : set.positives) {
      out.items.push_back(RankedItem{id, scorer(set.user_id, id), true});
    }
    for (const auto& id : set.negatives) {
      out.items.push_back(RankedItem{id, scorer(set.user_id, id), false});
    }
  } catch (const Error& e) {
    throw Error("scoring failed for user " + set.user_id + ": " + e.what());
  }
  std::sort(out.items.begin(), out.items.end(),
            [](const RankedItem& a, const RankedItem& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.item_id < b.item_id;
            });
  return out;
}

double precision_at_k(const RankedList& ranked, std::size_t k) {
  if (k == 0) throw ConfigError("K must be >= 1");
  std::size_t hits = 0;
  const std::size_t depth = std::min(k, ranked.items.size());
  for (std::size_t i = 0; i < depth; ++i) {
    if (ranked.items[i].relevant) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(k);
}

namespace {

std::size_t count_relevant(const RankedList& ranked) {
  std::size_t n = 0;
  for (const auto& item : ranked.items) n += item.relevant ? 1 : 0;
  return n;
}

}  // namespace

double recall_at_k(const RankedList& ranked, std::size_t k) {
  if (k == 0) throw ConfigError("K must be >= 1");
  const std::size_t total = count_relevant(ranked);
  if (total == 0) {
    throw NoPositivesError("recall undefined without relevant items (user " +
                           ranked.user_id + ")");
  }
  std::size_t hits = 0;
  const std::size_t depth = std::min(k, ranked.items.size());
  for (std::size_t i = 0; i < depth; ++i) {
    if (ranked.items[i].relevant) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

double ndcg_at_k(const RankedList& ranked, std::size_t k) {
  if (k == 0) throw ConfigError("K must be >= 1");
  const std::size_t total = count_relevant(ranked);
  if (total == 0) {
    throw NoPositivesError("ndcg undefined without relevant items (user " +
                           ranked.user_id + ")");
  }
  double dcg = 0.0;
  const std::size_t depth = std::min(k, ranked.items.size());
  for (std::size_t i = 0; i < depth; ++i) {
    if (ranked.items[i].relevant) {
      dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    }
  }
  double ideal = 0.0;
  const std::size_t ideal_depth = std::min(k, total);
  for (std::size_t i = 0; i < ideal_depth; ++i) {
    ideal += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  }
  return dcg / ideal;
}

MacroMetrics evaluate_model(const Scorer& scorer,
                            const std::vector<EvalCandidateSet>& candidates,
                            std::size_t k) {
  MacroMetrics out;
  for (const auto& set : candidates) {
    const RankedList ranked = rank_candidates(scorer, set);
    out.precision += precision_at_k(ranked, k);
    out.recall += recall_at_k(ranked, k);
    out.ndcg += ndcg_at_k(ranked, k);
    ++out.users;
  }
  if (out.users > 0) {
    out.precision /= static_cast<double>(out.users);
    out.recall /= static_cast<double>(out.users);
    out.ndcg /= static_cast<double>(out.users);
  }
  return out;
}

}  // namespace textrec
