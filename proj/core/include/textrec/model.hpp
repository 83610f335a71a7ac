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

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "textrec/metrics.hpp"
#include "textrec/types.hpp"

namespace textrec {

struct ModelConfig {
  std::size_t user_dim = 128;    // user embedding width = item tower output
  std::size_t item_hidden = 128; // item tower hidden width
  double dropout = 0.1;          // after the hidden layer, training only
  double learning_rate = 5e-4;
  double weight_decay = 5e-4;    // decoupled
  std::size_t batch_size = 4096;
  std::size_t max_epochs = 500;
  std::size_t eval_every = 5;       // validation cadence, in epochs
  std::size_t patience_windows = 5; // evaluations without improvement
  std::uint64_t seed = 0;
};

/// Mean-reduced binary cross-entropy with probabilities clamped to
/// [1e-7, 1 - 1e-7]; labels in {0,1}, scores in (0,1).
double bce_loss(std::span<const double> labels, std::span<const double> scores);

inline constexpr double kProbabilityEpsilon = 1e-7;

/// Item feature rows in a fixed item order (row-major, width dim).
struct FeatureMatrix {
  std::size_t dim = 0;
  std::vector<std::string> item_ids;
  std::vector<double> data;

  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * dim, dim};
  }
};

/// Training samples over dense user/item indices.
struct TrainingData {
  std::vector<std::string> user_ids;  // dense user index -> id
  struct Sample {
    std::uint32_t user = 0;
    std::uint32_t item = 0;  // row into the feature matrix
    float label = 0.0f;
  };
  std::vector<Sample> samples;
};

TrainingData make_training_data(const std::vector<Interaction>& positives,
                                const std::vector<Interaction>& negatives,
                                const FeatureMatrix& features);

/// User-ID embedding table plus a two-layer item tower over fused text
/// features; prediction is sigmoid(user . tower(features)). Parameters are
/// stored as one flat double vector so optimizers, finite-difference checks
/// and checkpoints all see the same layout:
/// [user_table | W1 | b1 | W2 | b2], matrices column-major.
class TwoTowerModel {
 public:
  TwoTowerModel(const ModelConfig& config, std::vector<std::string> user_ids,
                std::size_t feature_dim);

  /// Prediction in (0,1). UnknownUserError for users outside the table,
  /// DimMismatchError if the feature width differs from the config.
  double score(const std::string& user_id,
               std::span<const double> features) const;

  /// Tower latents for every feature row, dropout disabled.
  std::vector<double> item_latents(const FeatureMatrix& features) const;

  /// Mean BCE over the batch plus the gradient w.r.t. every parameter.
  /// Dropout masks are drawn from `rng_stream` when dropout > 0; evaluation
  /// paths never call this.
  double loss_and_gradient(const FeatureMatrix& features,
                           std::span<const TrainingData::Sample> batch,
                           std::uint64_t dropout_draw,
                           std::vector<double>& gradient) const;

  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }
  const ModelConfig& config() const { return config_; }
  const std::vector<std::string>& user_ids() const { return user_ids_; }
  std::size_t feature_dim() const { return feature_dim_; }

  void save_checkpoint(const std::string& path, std::size_t epoch,
                       const std::map<std::string, double>& metrics) const;
  static TwoTowerModel load_checkpoint(const std::string& path);

 private:
  friend struct ModelLayout;
  ModelConfig config_;
  std::vector<std::string> user_ids_;
  std::map<std::string, std::size_t> user_index_;
  std::size_t feature_dim_ = 0;
  std::vector<double> params_;
};

struct EpochStats {
  std::size_t epoch = 0;
  double loss = 0.0;
  double val_recall = -1.0;  // -1 when no evaluation ran this epoch
};

struct TrainResult {
  TwoTowerModel model;
  std::vector<EpochStats> history;
  double best_val_recall = 0.0;
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
};

/// Minibatch AdamW training with early stopping on validation Recall@K:
/// every eval_every epochs the model is evaluated, and training stops once
/// patience_windows evaluations pass without improvement. Returns the
/// parameters from the best evaluation. DivergedError on NaN loss.
TrainResult train(const ModelConfig& config, const TrainingData& data,
                  const FeatureMatrix& features,
                  const std::vector<EvalCandidateSet>& validation,
                  std::size_t k = kDefaultK);

void save_history_csv(const std::string& path,
                      const std::vector<EpochStats>& history);

struct GridCell {
  double learning_rate = 0.0;
  double dropout = 0.0;
  double val_recall = -1.0;
  bool failed = false;
  std::string error;
};

struct GridSearchResult {
  ModelConfig best_config;
  TrainResult best;  // train result of the winning cell
  std::vector<GridCell> cells;
};

/// Trains every (learning rate, dropout) cell with the same seed and keeps
/// the one with the highest validation Recall@K; ties prefer the lower
/// learning rate, then the lower dropout. Cell failures are recorded and
/// skipped.
GridSearchResult grid_search(const ModelConfig& base,
                             const std::vector<double>& learning_rates,
                             const std::vector<double>& dropouts,
                             const TrainingData& data,
                             const FeatureMatrix& features,
                             const std::vector<EvalCandidateSet>& validation,
                             std::size_t k = kDefaultK);

/// Learning-free control: score(u, i) = training interaction count of i.
Scorer item_popularity_baseline(const std::vector<Interaction>& train);

/// Frozen-checkpoint scorer: precomputes tower latents for every feature
/// row (dropout off) and scores by sigmoid(user . latent).
Scorer make_scorer(const TwoTowerModel& model, const FeatureMatrix& features);

}  // namespace textrec
