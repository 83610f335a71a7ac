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

#include "textrec/encoder.hpp"
#include "textrec/fusion.hpp"

namespace {

void BM_hash_encode(benchmark::State& state) {
  textrec::HashEncoder encoder(static_cast<std::size_t>(state.range(0)), 7);
  const std::string text =
      "A stray cat adopts a night-shift radio host and reviews the playlist.";
  for (auto _ : state) {
    auto v = encoder.encode(text);
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(BM_hash_encode)->Arg(32)->Arg(128)->Arg(384);

void BM_fuse_concat_all(benchmark::State& state) {
  const std::size_t dim = 128;
  std::map<std::string, std::vector<float>> components;
  for (const auto& name : textrec::canonical_component_order()) {
    components[name] = std::vector<float>(dim, 0.25f);
  }
  for (auto _ : state) {
    auto fused = textrec::fuse({textrec::FusionKind::concat_all, ""},
                               components);
    benchmark::DoNotOptimize(fused.values.data());
  }
}
BENCHMARK(BM_fuse_concat_all);

}  // namespace
