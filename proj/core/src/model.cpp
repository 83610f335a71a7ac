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

#include "textrec/model.hpp"

#include <algorithm>
#include <optional>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include <Eigen/Dense>
#include <json.hpp>

#include "textrec/errors.hpp"
#include "textrec/rng.hpp"

namespace textrec {

namespace {

// Strictly inside (0,1) for any finite logit.
constexpr double kScoreFloor = 1e-12;

double stable_sigmoid(double z) {
  double p;
  if (z >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    p = e / (1.0 + e);
  }
  return std::min(std::max(p, kScoreFloor), 1.0 - kScoreFloor);
}

}  // namespace

double bce_loss(std::span<const double> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) {
    throw LengthMismatchError("bce_loss: " + std::to_string(labels.size()) +
                              " labels vs " + std::to_string(scores.size()) +
                              " scores");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = std::min(std::max(scores[i], kProbabilityEpsilon),
                              1.0 - kProbabilityEpsilon);
    total -= labels[i] * std::log(p) + (1.0 - labels[i]) * std::log(1.0 - p);
  }
  return labels.empty() ? 0.0 : total / static_cast<double>(labels.size());
}

// Offsets into the flat parameter vector; matrices are column-major.
struct ModelLayout {
  std::size_t users, d, h, f;

  explicit ModelLayout(const TwoTowerModel& m)
      : users(m.user_ids_.size()),
        d(m.config_.user_dim),
        h(m.config_.item_hidden),
        f(m.feature_dim_) {}

  std::size_t user_table() const { return 0; }
  std::size_t w1() const { return users * d; }
  std::size_t b1() const { return w1() + h * f; }
  std::size_t w2() const { return b1() + h; }
  std::size_t b2() const { return w2() + d * h; }
  std::size_t total() const { return b2() + d; }
};

TwoTowerModel::TwoTowerModel(const ModelConfig& config,
                             std::vector<std::string> user_ids,
                             std::size_t feature_dim)
    : config_(config), user_ids_(std::move(user_ids)), feature_dim_(feature_dim) {
  if (config_.dropout < 0.0 || config_.dropout >= 1.0) {
    throw ConfigError("dropout must be in [0, 1)");
  }
  for (std::size_t i = 0; i < user_ids_.size(); ++i) {
    user_index_[user_ids_[i]] = i;
  }
  const ModelLayout L(*this);
  params_.assign(L.total(), 0.0);

  Rng rng(child_seed(config_.seed, "init"));
  for (std::size_t i = 0; i < L.users * L.d; ++i) {
    params_[L.user_table() + i] = 0.1 * rng.normal();
  }
  const double w1_scale = std::sqrt(2.0 / static_cast<double>(L.f));
  for (std::size_t i = 0; i < L.h * L.f; ++i) {
    params_[L.w1() + i] = w1_scale * rng.normal();
  }
  const double w2_scale = std::sqrt(2.0 / static_cast<double>(L.h));
  for (std::size_t i = 0; i < L.d * L.h; ++i) {
    params_[L.w2() + i] = w2_scale * rng.normal();
  }
}

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMap = Eigen::Map<const Mat>;
using CVMap = Eigen::Map<const Vec>;

}  // namespace

double TwoTowerModel::score(const std::string& user_id,
                            std::span<const double> features) const {
  auto it = user_index_.find(user_id);
  if (it == user_index_.end()) {
    throw UnknownUserError("user not in embedding table: " + user_id);
  }
  if (features.size() != feature_dim_) {
    throw DimMismatchError("feature dim " + std::to_string(features.size()) +
                           ", model expects " + std::to_string(feature_dim_));
  }
  const ModelLayout L(*this);
  const double* p = params_.data();
  CMap user_table(p + L.user_table(), L.d, L.users);
  CMap w1(p + L.w1(), L.h, L.f);
  CVMap b1(p + L.b1(), L.h);
  CMap w2(p + L.w2(), L.d, L.h);
  CVMap b2(p + L.b2(), L.d);

  CVMap x(features.data(), static_cast<Eigen::Index>(L.f));
  const Vec a1 = (w1 * x + b1).cwiseMax(0.0);
  const Vec v = w2 * a1 + b2;
  return stable_sigmoid(user_table.col(static_cast<Eigen::Index>(it->second))
                            .dot(v));
}

std::vector<double> TwoTowerModel::item_latents(
    const FeatureMatrix& features) const {
  if (features.dim != feature_dim_) {
    throw DimMismatchError("feature dim " + std::to_string(features.dim) +
                           ", model expects " + std::to_string(feature_dim_));
  }
  const ModelLayout L(*this);
  const double* p = params_.data();
  CMap w1(p + L.w1(), L.h, L.f);
  CVMap b1(p + L.b1(), L.h);
  CMap w2(p + L.w2(), L.d, L.h);
  CVMap b2(p + L.b2(), L.d);

  const auto n = static_cast<Eigen::Index>(features.item_ids.size());
  Mat x(L.f, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.col(i) = CVMap(features.data.data() + static_cast<std::size_t>(i) * L.f,
                     static_cast<Eigen::Index>(L.f));
  }
  Mat a1 = ((w1 * x).colwise() + b1).cwiseMax(0.0);
  Mat v = (w2 * a1).colwise() + b2;
  std::vector<double> out(static_cast<std::size_t>(L.d) * n);
  Eigen::Map<Mat>(out.data(), L.d, n) = v;
  return out;
}

double TwoTowerModel::loss_and_gradient(
    const FeatureMatrix& features, std::span<const TrainingData::Sample> batch,
    std::uint64_t dropout_draw, std::vector<double>& gradient) const {
  const ModelLayout L(*this);
  gradient.assign(L.total(), 0.0);
  if (batch.empty()) return 0.0;

  const double* p = params_.data();
  CMap user_table(p + L.user_table(), L.d, L.users);
  CMap w1(p + L.w1(), L.h, L.f);
  CVMap b1(p + L.b1(), L.h);
  CMap w2(p + L.w2(), L.d, L.h);
  CVMap b2(p + L.b2(), L.d);

  double* g = gradient.data();
  Eigen::Map<Mat> g_user(g + L.user_table(), L.d, L.users);
  Eigen::Map<Mat> g_w1(g + L.w1(), L.h, L.f);
  Eigen::Map<Vec> g_b1(g + L.b1(), L.h);
  Eigen::Map<Mat> g_w2(g + L.w2(), L.d, L.h);
  Eigen::Map<Vec> g_b2(g + L.b2(), L.d);

  // One tower pass per unique item in the batch.
  std::unordered_map<std::uint32_t, Eigen::Index> local;
  std::vector<std::uint32_t> unique_items;
  for (const auto& s : batch) {
    if (local.emplace(s.item, static_cast<Eigen::Index>(unique_items.size()))
            .second) {
      unique_items.push_back(s.item);
    }
  }
  const auto n_items = static_cast<Eigen::Index>(unique_items.size());
  Mat x(L.f, n_items);
  for (Eigen::Index c = 0; c < n_items; ++c) {
    x.col(c) = CVMap(
        features.data.data() + static_cast<std::size_t>(unique_items[c]) * L.f,
        static_cast<Eigen::Index>(L.f));
  }
  Mat z1 = (w1 * x).colwise() + b1;
  Mat a1 = z1.cwiseMax(0.0);

  const double keep = 1.0 - config_.dropout;
  Mat mask;
  if (config_.dropout > 0.0) {
    Rng rng(dropout_draw);
    mask = Mat(L.h, n_items);
    for (Eigen::Index c = 0; c < n_items; ++c) {
      for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(L.h); ++r) {
        mask(r, c) = rng.uniform01() < keep ? 1.0 / keep : 0.0;
      }
    }
    a1 = a1.cwiseProduct(mask);
  }
  Mat v = (w2 * a1).colwise() + b2;

  const double inv_n = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  Mat dv = Mat::Zero(L.d, n_items);
  for (const auto& s : batch) {
    const auto u = static_cast<Eigen::Index>(s.user);
    const Eigen::Index c = local.at(s.item);
    const double z = user_table.col(u).dot(v.col(c));
    const double prob = stable_sigmoid(z);
    const double clamped = std::min(std::max(prob, kProbabilityEpsilon),
                                    1.0 - kProbabilityEpsilon);
    const double y = static_cast<double>(s.label);
    loss -= y * std::log(clamped) + (1.0 - y) * std::log(1.0 - clamped);
    // d(mean BCE)/d(logit); zero where the probability clamp is active.
    double dz = 0.0;
    if (prob > kProbabilityEpsilon && prob < 1.0 - kProbabilityEpsilon) {
      dz = (prob - y) * inv_n;
    }
    g_user.col(u) += dz * v.col(c);
    dv.col(c) += dz * user_table.col(u);
  }
  loss *= inv_n;

  g_w2 = dv * a1.transpose();
  g_b2 = dv.rowwise().sum();
  Mat da1 = w2.transpose() * dv;
  if (config_.dropout > 0.0) da1 = da1.cwiseProduct(mask);
  Mat dz1 = da1.cwiseProduct((z1.array() > 0.0).cast<double>().matrix());
  g_w1 = dz1 * x.transpose();
  g_b1 = dz1.rowwise().sum();
  return loss;
}

TrainingData make_training_data(const std::vector<Interaction>& positives,
                                const std::vector<Interaction>& negatives,
                                const FeatureMatrix& features) {
  std::unordered_map<std::string, std::uint32_t> item_index;
  for (std::size_t i = 0; i < features.item_ids.size(); ++i) {
    item_index[features.item_ids[i]] = static_cast<std::uint32_t>(i);
  }
  std::vector<Interaction> all;
  all.reserve(positives.size() + negatives.size());
  all.insert(all.end(), positives.begin(), positives.end());
  all.insert(all.end(), negatives.begin(), negatives.end());
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return std::tie(a.user_id, a.item_id, a.label) <
           std::tie(b.user_id, b.item_id, b.label);
  });

  TrainingData data;
  for (const auto& x : all) data.user_ids.push_back(x.user_id);
  std::sort(data.user_ids.begin(), data.user_ids.end());
  data.user_ids.erase(std::unique(data.user_ids.begin(), data.user_ids.end()),
                      data.user_ids.end());
  std::unordered_map<std::string, std::uint32_t> user_index;
  for (std::size_t i = 0; i < data.user_ids.size(); ++i) {
    user_index[data.user_ids[i]] = static_cast<std::uint32_t>(i);
  }
  for (const auto& x : all) {
    auto it = item_index.find(x.item_id);
    if (it == item_index.end()) {
      throw MissingComponentError("no features for item " + x.item_id);
    }
    data.samples.push_back(TrainingData::Sample{
        user_index.at(x.user_id), it->second, static_cast<float>(x.label)});
  }
  return data;
}

Scorer make_scorer(const TwoTowerModel& model, const FeatureMatrix& features) {
  auto latents = std::make_shared<std::vector<double>>(
      model.item_latents(features));
  auto item_index = std::make_shared<std::unordered_map<std::string, std::size_t>>();
  for (std::size_t i = 0; i < features.item_ids.size(); ++i) {
    (*item_index)[features.item_ids[i]] = i;
  }
  auto user_index = std::make_shared<std::unordered_map<std::string, std::size_t>>();
  for (std::size_t i = 0; i < model.user_ids().size(); ++i) {
    (*user_index)[model.user_ids()[i]] = i;
  }
  const std::size_t d = model.config().user_dim;
  auto params = std::make_shared<std::vector<double>>(model.parameters());
  return [latents, item_index, user_index, params, d](
             const std::string& user, const std::string& item) {
    auto ui = user_index->find(user);
    if (ui == user_index->end()) {
      throw UnknownUserError("user not in embedding table: " + user);
    }
    auto ii = item_index->find(item);
    if (ii == item_index->end()) {
      throw MissingComponentError("no features for item " + item);
    }
    const double* u = params->data() + ui->second * d;
    const double* v = latents->data() + ii->second * d;
    double z = 0.0;
    for (std::size_t j = 0; j < d; ++j) z += u[j] * v[j];
    return stable_sigmoid(z);
  };
}

TrainResult train(const ModelConfig& config, const TrainingData& data,
                  const FeatureMatrix& features,
                  const std::vector<EvalCandidateSet>& validation,
                  std::size_t k) {
  if (data.samples.empty()) throw InsufficientDataError("no training samples");
  TrainResult result{TwoTowerModel(config, data.user_ids, features.dim),
                     {},
                     0.0,
                     0,
                     0};

  auto& params = result.model.parameters();
  std::vector<double> grad(params.size(), 0.0);
  std::vector<double> m(params.size(), 0.0);
  std::vector<double> v(params.size(), 0.0);
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double adam_eps = 1e-8;
  std::size_t step = 0;

  std::vector<std::size_t> order(data.samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng shuffle_rng(child_seed(config.seed, "shuffle"));

  std::vector<double> best_params;
  bool has_best = false;
  std::size_t windows_since_best = 0;
  std::vector<TrainingData::Sample> batch;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end =
          std::min(start + config.batch_size, order.size());
      batch.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(data.samples[order[i]]);
      }
      const std::uint64_t draw = child_seed(
          config.seed,
          "dropout/" + std::to_string(epoch) + "/" + std::to_string(start));
      const double loss =
          result.model.loss_and_gradient(features, batch, draw, grad);
      if (!std::isfinite(loss)) {
        throw DivergedError("training loss is not finite at epoch " +
                            std::to_string(epoch));
      }
      epoch_loss += loss * static_cast<double>(batch.size());
      seen += batch.size();

      ++step;
      const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
        const double update = (m[i] / bc1) / (std::sqrt(v[i] / bc2) + adam_eps);
        params[i] -= config.learning_rate *
                     (update + config.weight_decay * params[i]);
      }
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.loss = epoch_loss / static_cast<double>(seen);
    result.epochs_run = epoch;

    const bool eval_now = (config.eval_every > 0 &&
                           epoch % config.eval_every == 0) ||
                          epoch == config.max_epochs;
    bool stop = false;
    if (eval_now && !validation.empty()) {
      const auto metrics =
          evaluate_model(make_scorer(result.model, features), validation, k);
      stats.val_recall = metrics.recall;
      if (!has_best || metrics.recall > result.best_val_recall) {
        result.best_val_recall = metrics.recall;
        result.best_epoch = epoch;
        best_params = params;
        has_best = true;
        windows_since_best = 0;
      } else {
        ++windows_since_best;
        if (windows_since_best >= config.patience_windows) stop = true;
      }
    }
    result.history.push_back(stats);
    if (stop) break;
  }
  if (has_best) params = best_params;
  return result;
}

void save_history_csv(const std::string& path,
                      const std::vector<EpochStats>& history) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write history: " + path);
  out << "epoch,loss,val_recall\n";
  for (const auto& s : history) {
    out << s.epoch << ',' << s.loss << ',';
    if (s.val_recall >= 0.0) out << s.val_recall;
    out << '\n';
  }
}

GridSearchResult grid_search(const ModelConfig& base,
                             const std::vector<double>& learning_rates,
                             const std::vector<double>& dropouts,
                             const TrainingData& data,
                             const FeatureMatrix& features,
                             const std::vector<EvalCandidateSet>& validation,
                             std::size_t k) {
  if (learning_rates.empty() || dropouts.empty()) {
    throw ConfigError("grid search needs a non-empty grid");
  }
  std::optional<TrainResult> best;
  ModelConfig best_config = base;
  std::vector<GridCell> cells;
  for (double lr : learning_rates) {
    for (double dropout : dropouts) {
      GridCell cell;
      cell.learning_rate = lr;
      cell.dropout = dropout;
      ModelConfig config = base;
      config.learning_rate = lr;
      config.dropout = dropout;
      try {
        TrainResult r = train(config, data, features, validation, k);
        cell.val_recall = r.best_val_recall;
        const bool better =
            !best || cell.val_recall > best->best_val_recall ||
            (cell.val_recall == best->best_val_recall &&
             std::tie(lr, dropout) < std::tie(best_config.learning_rate,
                                              best_config.dropout));
        if (better) {
          best_config = config;
          best.emplace(std::move(r));
        }
      } catch (const Error& e) {
        cell.failed = true;
        cell.error = e.what();
      }
      cells.push_back(cell);
    }
  }
  if (!best) throw Error("every grid cell failed");
  return GridSearchResult{best_config, std::move(*best), std::move(cells)};
}

Scorer item_popularity_baseline(const std::vector<Interaction>& train) {
  auto counts = std::make_shared<std::unordered_map<std::string, double>>();
  for (const auto& x : train) {
    if (x.label == 1) (*counts)[x.item_id] += 1.0;
  }
  return [counts](const std::string&, const std::string& item) {
    auto it = counts->find(item);
    return it == counts->end() ? 0.0 : it->second;
  };
}

void TwoTowerModel::save_checkpoint(
    const std::string& path, std::size_t epoch,
    const std::map<std::string, double>& metrics) const {
  nlohmann::json header;
  header["format"] = "textrec-checkpoint-1";
  header["config"] = {{"user_dim", config_.user_dim},
                      {"item_hidden", config_.item_hidden},
                      {"dropout", config_.dropout},
                      {"learning_rate", config_.learning_rate},
                      {"weight_decay", config_.weight_decay},
                      {"batch_size", config_.batch_size},
                      {"max_epochs", config_.max_epochs},
                      {"eval_every", config_.eval_every},
                      {"patience_windows", config_.patience_windows},
                      {"seed", config_.seed}};
  header["epoch"] = epoch;
  header["metrics"] = metrics;
  header["user_ids"] = user_ids_;
  header["feature_dim"] = feature_dim_;
  header["param_count"] = params_.size();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint: " + path);
  out << header.dump() << "\n";
  std::vector<float> blob(params_.begin(), params_.end());
  out.write(reinterpret_cast<const char*>(blob.data()),
            static_cast<std::streamsize>(blob.size() * sizeof(float)));
}

TwoTowerModel TwoTowerModel::load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("checkpoint missing header");
  nlohmann::json header = nlohmann::json::parse(line, nullptr, false);
  if (header.is_discarded() ||
      header.value("format", "") != "textrec-checkpoint-1") {
    throw ParseError("unrecognized checkpoint header: " + path);
  }
  ModelConfig config;
  const auto& c = header.at("config");
  config.user_dim = c.at("user_dim").get<std::size_t>();
  config.item_hidden = c.at("item_hidden").get<std::size_t>();
  config.dropout = c.at("dropout").get<double>();
  config.learning_rate = c.at("learning_rate").get<double>();
  config.weight_decay = c.at("weight_decay").get<double>();
  config.batch_size = c.at("batch_size").get<std::size_t>();
  config.max_epochs = c.at("max_epochs").get<std::size_t>();
  config.eval_every = c.at("eval_every").get<std::size_t>();
  config.patience_windows = c.at("patience_windows").get<std::size_t>();
  config.seed = c.at("seed").get<std::uint64_t>();

  TwoTowerModel model(config, header.at("user_ids").get<std::vector<std::string>>(),
                      header.at("feature_dim").get<std::size_t>());
  const std::size_t count = header.at("param_count").get<std::size_t>();
  if (count != model.params_.size()) {
    throw ParseError("checkpoint parameter count mismatch");
  }
  std::vector<float> blob(count);
  in.read(reinterpret_cast<char*>(blob.data()),
          static_cast<std::streamsize>(count * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) != count * sizeof(float)) {
    throw ParseError("checkpoint blob truncated: " + path);
  }
  std::copy(blob.begin(), blob.end(), model.params_.begin());
  return model;
}

}  // namespace textrec
