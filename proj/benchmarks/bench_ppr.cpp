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

#include "textrec/graph.hpp"
#include "textrec/rng.hpp"

namespace {

textrec::BipartiteGraph make_graph(std::size_t users, std::size_t items,
                                   std::size_t per_user) {
  textrec::Rng rng(12);
  std::vector<textrec::Interaction> interactions;
  interactions.reserve(users * per_user);
  for (std::size_t u = 0; u < users; ++u) {
    for (std::size_t e = 0; e < per_user; ++e) {
      interactions.push_back(textrec::Interaction{
          "u" + std::to_string(u),
          "i" + std::to_string(rng.uniform_index(items)), 1, -1});
    }
  }
  return textrec::BipartiteGraph::build(interactions);
}

void BM_ppr_power_iteration(benchmark::State& state) {
  const auto graph =
      make_graph(static_cast<std::size_t>(state.range(0)),
                 static_cast<std::size_t>(state.range(0)) / 2, 20);
  const std::size_t source = graph.num_users();  // first item node
  for (auto _ : state) {
    auto ppr = textrec::compute_ppr(graph, source, 0.15, 1e-6, 1000);
    benchmark::DoNotOptimize(ppr.scores.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ppr_power_iteration)->RangeMultiplier(4)->Range(64, 4096)
    ->Complexity();

void BM_neighbor_selection(benchmark::State& state) {
  const auto graph = make_graph(512, 256, 20);
  const std::size_t source = graph.num_users();
  const auto ppr = textrec::compute_ppr(graph, source, 0.15, 1e-6, 1000);
  for (auto _ : state) {
    auto neighbors = textrec::top_neighbors(graph, ppr, 3);
    benchmark::DoNotOptimize(neighbors.neighbors.data());
  }
}
BENCHMARK(BM_neighbor_selection);

}  // namespace
