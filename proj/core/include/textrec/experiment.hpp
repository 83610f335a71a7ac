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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "textrec/config.hpp"
#include "textrec/metrics.hpp"

namespace textrec {

/// (value - base) / base, the relative-gain column of every report.
double relative_gain(double value, double base);

/// Location of the shipped reference-result fixtures (report annotation
/// only; never asserted against pipeline output).
std::string reference_results_path();

struct ReferenceEntry {
  double precision = 0.0;
  double recall = 0.0;
  double ndcg = 0.0;
};

/// Fixture lookup, e.g. ("movielens", "concat_all_gpt3").
ReferenceEntry load_reference_entry(const std::string& dataset,
                                    const std::string& row,
                                    const std::string& path = "");

struct SeedResult {
  std::uint64_t seed = 0;
  MacroMetrics test;
  double best_val_recall = 0.0;
  double chosen_learning_rate = 0.0;
  double chosen_dropout = 0.0;
  bool failed = false;
  std::string error;
};

struct MetricsReport {
  std::size_t k = kDefaultK;
  std::string protocol;  // human-readable descriptor of the ranking protocol
  std::vector<SeedResult> per_seed;
  MacroMetrics mean;
  MacroMetrics stddev;  // sample standard deviation over seeds
  bool complete = true;
};

MetricsReport aggregate_seed_results(std::vector<SeedResult> per_seed,
                                     std::size_t k);

struct AblationCell {
  std::string fusion;
  MetricsReport report;
  double ndcg_gain_vs_base = 0.0;  // relative to the original_only cell
  double precision_gain_vs_base = 0.0;
  double recall_gain_vs_base = 0.0;
};

struct AblationResult {
  std::string base_fusion = "original_only";
  std::vector<AblationCell> cells;
};

struct StageOptions {
  bool dry_run = false;
  bool force = false;       // skip config-digest checks on existing artifacts
  std::ostream* log = nullptr;
};

// File-driven pipeline stages. Every stage writes under config.run_root(),
// stamps artifacts with the config digest and refuses mismatched upstream
// artifacts unless forced. Stages are idempotent for unchanged inputs.
void stage_ingest(const PipelineConfig& config, const StageOptions& opt = {});
AugmentReport stage_augment(const PipelineConfig& config,
                            const StageOptions& opt = {});
void stage_embed(const PipelineConfig& config, const StageOptions& opt = {});
void stage_train(const PipelineConfig& config, const StageOptions& opt = {});
MetricsReport stage_eval(const PipelineConfig& config,
                         const StageOptions& opt = {});
AblationResult stage_ablate(const PipelineConfig& config,
                            const StageOptions& opt = {});
void stage_analyze(const PipelineConfig& config, const StageOptions& opt = {});

/// ingest -> augment -> embed -> train -> eval; returns the eval report.
MetricsReport run_pipeline(const PipelineConfig& config,
                           const StageOptions& opt = {});

/// Path of the machine-readable result file written by stage_eval.
std::string results_path(const PipelineConfig& config);
std::string ablation_csv_path(const PipelineConfig& config);

}  // namespace textrec
