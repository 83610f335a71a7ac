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
#include <string>
#include <vector>

#include "textrec/analysis.hpp"
#include "textrec/augment.hpp"
#include "textrec/corpus.hpp"
#include "textrec/fusion.hpp"
#include "textrec/graph.hpp"
#include "textrec/model.hpp"
#include "textrec/provider_http.hpp"
#include "textrec/synthetic.hpp"

namespace textrec {

/// Everything a run needs, validated up front. The stable digest of the
/// canonical serialization names the run directory and is stamped into
/// every artifact, so stages can refuse stale inputs.
struct PipelineConfig {
  // Data source: either file paths or the synthetic generator.
  std::string items_path;
  std::string interactions_path;
  ItemFileFormat items_format = ItemFileFormat::jsonl;
  bool use_synthetic = false;
  SyntheticSpec synthetic;

  std::size_t min_user_interactions = 20;
  std::size_t min_item_interactions = 30;

  // Splits and negative sampling.
  std::array<double, 3> split_ratio{0.8, 0.1, 0.1};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::size_t eval_negatives = 1000;
  std::size_t train_negative_ratio = 1;

  // Engagement neighbors.
  NeighborParams neighbors;

  // Completion provider.
  std::string provider_kind = "mock";
  CompletionParams completion;
  HttpProviderConfig http;
  std::uint64_t mock_seed = 11;
  SignalLexicon lexicon;
  std::size_t jobs = 1;

  // Text encoder.
  std::string encoder_kind = "hash";
  std::size_t encoder_dim = 32;
  std::uint64_t encoder_seed = 13;
  float encoder_lexicon_bump = 1.0f;

  // Augmentation strategies and feature fusion.
  std::vector<Strategy> strategies{kAllStrategies.begin(), kAllStrategies.end()};
  FusionStrategy fusion{FusionKind::concat_all, ""};
  /// Extra response components to embed (e.g. "para_mask", "para_keyword").
  std::vector<std::string> extra_components;
  std::string keywords_path;  // one keyword per line; "" = derive from genres

  // Recommendation model and its search grid.
  ModelConfig model;
  std::vector<double> grid_learning_rates;  // empty = {model.learning_rate}
  std::vector<double> grid_dropouts;        // empty = {model.dropout}

  // Evaluation.
  std::size_t k = kDefaultK;

  // Ablation cells (fusion strategy ids) for the ablate stage.
  std::vector<std::string> ablation_fusions{"original_only", "concat_basic",
                                            "concat_rec", "concat_all"};

  // Analysis stage knobs.
  std::size_t analysis_sample = 50;  // items sampled for variant similarity
  bool analysis_variants = true;     // also augment with the "v1" rewording

  std::string output_dir = "runs";

  void validate() const;
  std::string to_canonical_json() const;
  std::string digest() const;
  std::string run_root() const;  // output_dir / digest prefix

  static PipelineConfig from_json_text(const std::string& text);
  static PipelineConfig from_file(const std::string& path);
  /// Dotted-path override, e.g. "model.learning_rate=0.001"; flag values
  /// win over the file.
  void apply_override(const std::string& assignment);
};

}  // namespace textrec
