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

#include "textrec/model.hpp"
#include "textrec/rng.hpp"

namespace {

void BM_loss_and_gradient(benchmark::State& state) {
  const std::size_t items = 100;
  const std::size_t feature_dim = 288;  // 9 components x 32
  textrec::Rng rng(5);
  textrec::FeatureMatrix features;
  features.dim = feature_dim;
  for (std::size_t i = 0; i < items; ++i) {
    features.item_ids.push_back("i" + std::to_string(i));
    for (std::size_t d = 0; d < feature_dim; ++d) {
      features.data.push_back(rng.normal());
    }
  }
  textrec::TrainingData data;
  for (int u = 0; u < 200; ++u) data.user_ids.push_back("u" + std::to_string(u));
  for (std::size_t s = 0; s < static_cast<std::size_t>(state.range(0)); ++s) {
    data.samples.push_back(textrec::TrainingData::Sample{
        static_cast<std::uint32_t>(rng.uniform_index(200)),
        static_cast<std::uint32_t>(rng.uniform_index(items)),
        rng.uniform01() < 0.5 ? 0.0f : 1.0f});
  }
  textrec::ModelConfig config;
  config.user_dim = 32;
  config.item_hidden = 64;
  config.dropout = 0.1;
  config.seed = 9;
  textrec::TwoTowerModel model(config, data.user_ids, feature_dim);
  std::vector<double> grad;
  for (auto _ : state) {
    const double loss =
        model.loss_and_gradient(features, data.samples, 42, grad);
    benchmark::DoNotOptimize(loss);
    benchmark::DoNotOptimize(grad.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_loss_and_gradient)->Arg(256)->Arg(1024)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
