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

#include <benchmark/benchmark.h>

#include <unordered_map>

#include "textrec/metrics.hpp"
#include "textrec/rng.hpp"

namespace {

void BM_rank_and_score_user(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  textrec::Rng rng(3);
  textrec::EvalCandidateSet cs;
  cs.user_id = "u";
  std::unordered_map<std::string, double> scores;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = "i" + std::to_string(i);
    (i < 3 ? cs.positives : cs.negatives).push_back(id);
    scores[id] = rng.normal();
  }
  const textrec::Scorer scorer = [&scores](const std::string&,
                                           const std::string& id) {
    return scores.at(id);
  };
  for (auto _ : state) {
    const auto ranked = textrec::rank_candidates(scorer, cs);
    const double ndcg = textrec::ndcg_at_k(ranked, 10);
    benchmark::DoNotOptimize(ndcg);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_rank_and_score_user)->RangeMultiplier(4)->Range(64, 4096)
    ->Complexity();

}  // namespace
