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

// End-to-end acceptance checks. Each criterion prints exactly one
// PASS/FAIL line; the process exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "textrec/config.hpp"
#include "textrec/digest.hpp"
#include "textrec/errors.hpp"
#include "textrec/experiment.hpp"
#include "textrec/graph.hpp"
#include "textrec/metrics.hpp"
#include "textrec/model.hpp"
#include "textrec/prompts.hpp"
#include "textrec/rng.hpp"

namespace fs = std::filesystem;
using namespace textrec;

namespace {

using Clock = std::chrono::steady_clock;

struct Criterion {
  std::string name;
  std::function<bool(std::string&)> run;
  double limit_seconds;
};

// ---------------------------------------------------------------------------
// 1. Ranking metrics equal a brute-force counting oracle exactly.
// ---------------------------------------------------------------------------

struct OracleMetrics {
  double precision, recall, ndcg;
};

OracleMetrics counting_oracle(const std::map<std::string, double>& scores,
                              const std::map<std::string, bool>& relevant,
                              std::size_t k) {
  std::size_t total_relevant = 0;
  for (const auto& [_, rel] : relevant) total_relevant += rel ? 1 : 0;
  std::vector<std::size_t> hit_ranks;
  for (const auto& [id, rel] : relevant) {
    if (!rel) continue;
    std::size_t beaten = 0;
    for (const auto& [other, score] : scores) {
      if (other != id &&
          (score > scores.at(id) ||
           (score == scores.at(id) && other < id))) {
        ++beaten;
      }
    }
    if (beaten + 1 <= k) hit_ranks.push_back(beaten + 1);
  }
  // Sum in rank order so the terms match the implementation bit for bit.
  std::sort(hit_ranks.begin(), hit_ranks.end());
  const std::size_t hits = hit_ranks.size();
  double dcg = 0.0;
  for (std::size_t rank : hit_ranks) {
    dcg += 1.0 / std::log2(static_cast<double>(rank) + 1.0);
  }
  double ideal = 0.0;
  for (std::size_t r = 1; r <= std::min(k, total_relevant); ++r) {
    ideal += 1.0 / std::log2(static_cast<double>(r) + 1.0);
  }
  return {static_cast<double>(hits) / static_cast<double>(k),
          static_cast<double>(hits) / static_cast<double>(total_relevant),
          dcg / ideal};
}

bool criterion_metric_oracles(std::string& detail) {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(7);
    std::map<std::string, double> scores;
    std::map<std::string, bool> relevant;
    EvalCandidateSet cs;
    cs.user_id = "u";
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string id = "i" + std::to_string(i);
      scores[id] = static_cast<double>(rng.uniform_index(5));
      const bool rel = rng.uniform01() < 0.4;
      relevant[id] = rel;
      any |= rel;
      (rel ? cs.positives : cs.negatives).push_back(id);
    }
    if (!any) {
      relevant["i0"] = true;
      cs.negatives.erase(cs.negatives.begin());
      cs.positives.push_back("i0");
    }
    const std::size_t k = 1 + rng.uniform_index(8);
    const auto ranked = rank_candidates(
        [&scores](const std::string&, const std::string& id) {
          return scores.at(id);
        },
        cs);
    const auto oracle = counting_oracle(scores, relevant, k);
    if (precision_at_k(ranked, k) != oracle.precision ||
        recall_at_k(ranked, k) != oracle.recall ||
        ndcg_at_k(ranked, k) != oracle.ndcg) {
      detail = "mismatch at trial " + std::to_string(trial);
      return false;
    }
  }
  detail = "1000 candidate sets, exact equality";
  return true;
}

// ---------------------------------------------------------------------------
// 2. Power-iteration PPR matches a dense linear solve.
// ---------------------------------------------------------------------------

bool criterion_ppr_oracle(std::string& detail) {
  Rng rng(77);
  int graphs_checked = 0;
  double worst = 0.0;
  while (graphs_checked < 50) {
    const std::size_t users = 2 + rng.uniform_index(13);
    const std::size_t items = 2 + rng.uniform_index(13);
    std::vector<Interaction> interactions;
    for (std::size_t u = 0; u < users; ++u) {
      const std::size_t degree = 1 + rng.uniform_index(items);
      for (std::size_t e = 0; e < degree; ++e) {
        interactions.push_back(Interaction{
            "u" + std::to_string(u),
            "i" + std::to_string(rng.uniform_index(items)), 1, -1});
      }
    }
    const auto graph = BipartiteGraph::build(interactions);
    if (graph.num_nodes() > 30) continue;
    const std::size_t source = rng.uniform_index(graph.num_nodes());
    if (graph.degree(source) == 0) continue;
    ++graphs_checked;

    const auto ppr = compute_ppr(graph, source, 0.15, 1e-10, 100000);
    double sum = 0.0;
    for (double s : ppr.scores) sum += s;
    if (std::abs(sum - 1.0) > 1e-8) {
      detail = "mass not conserved: " + std::to_string(sum);
      return false;
    }

    const auto n = static_cast<Eigen::Index>(graph.num_nodes());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index v = 0; v < n; ++v) {
      const auto& adj = graph.neighbors_of(static_cast<std::size_t>(v));
      for (std::size_t neighbor : adj) {
        w(v, static_cast<Eigen::Index>(neighbor)) =
            1.0 / static_cast<double>(adj.size());
      }
    }
    Eigen::MatrixXd system =
        Eigen::MatrixXd::Identity(n, n) - 0.85 * w.transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(static_cast<Eigen::Index>(source)) = 0.15;
    const Eigen::VectorXd x = system.colPivHouseholderQr().solve(rhs);
    for (Eigen::Index v = 0; v < n; ++v) {
      worst = std::max(worst,
                       std::abs(ppr.scores[static_cast<std::size_t>(v)] - x(v)));
    }
    if (worst > 1e-6) {
      detail = "max-norm gap " + std::to_string(worst);
      return false;
    }
  }
  std::ostringstream ss;
  ss << "50 graphs, worst max-norm gap " << worst;
  detail = ss.str();
  return true;
}

// ---------------------------------------------------------------------------
// 3. Analytic gradients of the scoring + BCE path vs central differences.
// ---------------------------------------------------------------------------

bool criterion_gradients(std::string& detail) {
  Rng rng(314);
  double worst_rel = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    ModelConfig config;
    config.user_dim = 8;
    config.item_hidden = 4;
    config.dropout = 0.0;
    config.seed = 500 + static_cast<std::uint64_t>(trial);
    const std::size_t items = 5;
    FeatureMatrix features;
    features.dim = 6;
    for (std::size_t i = 0; i < items; ++i) {
      features.item_ids.push_back("i" + std::to_string(i));
      for (std::size_t d = 0; d < features.dim; ++d) {
        features.data.push_back(rng.normal());
      }
    }
    TrainingData data;
    for (int u = 0; u < 4; ++u) data.user_ids.push_back("u" + std::to_string(u));
    for (int s = 0; s < 16; ++s) {
      data.samples.push_back(TrainingData::Sample{
          static_cast<std::uint32_t>(rng.uniform_index(4)),
          static_cast<std::uint32_t>(rng.uniform_index(items)),
          rng.uniform01() < 0.5 ? 0.0f : 1.0f});
    }
    TwoTowerModel model(config, data.user_ids, features.dim);
    std::vector<double> grad;
    model.loss_and_gradient(features, data.samples, 0, grad);
    auto& params = model.parameters();
    const double h = 1e-4;
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double saved = params[i];
      std::vector<double> scratch;
      params[i] = saved + h;
      const double up =
          model.loss_and_gradient(features, data.samples, 0, scratch);
      params[i] = saved - h;
      const double down =
          model.loss_and_gradient(features, data.samples, 0, scratch);
      params[i] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double rel = std::abs(grad[i] - fd) /
                         std::max({std::abs(grad[i]), std::abs(fd), 1e-6});
      worst_rel = std::max(worst_rel, rel);
      if (rel > 1e-4) {
        std::ostringstream ss;
        ss << "trial " << trial << " param " << i << " rel error " << rel;
        detail = ss.str();
        return false;
      }
    }
  }
  std::ostringstream ss;
  ss << "20 models, worst relative error " << worst_rel;
  detail = ss.str();
  return true;
}

// ---------------------------------------------------------------------------
// 4. The eight canonical prompt templates match the stored golden files.
// ---------------------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool criterion_prompt_goldens(std::string& detail) {
  const std::string dir = std::string(TEXTREC_TEST_DATA_DIR) + "/prompt_golden/";
  const ItemRecord item{
      "m1", "A lighthouse keeper trades letters with a ship that never docks.",
      {}};
  const NeighborDescriptions neighbors = {
      {"n1", "A clockmaker repairs the town's memories every midnight."},
      {"n2", "Two strangers share an umbrella through a year of storms."},
      {"n3", "A gardener grows constellations in a rooftop greenhouse."},
  };
  const auto registry = PromptRegistry::canonical();
  for (Strategy s : kAllStrategies) {
    const auto* n = needs_neighbors(s) ? &neighbors : nullptr;
    const auto prompt = render_prompt(registry, s, item, n);
    const auto expected = read_file(dir + to_string(s) + ".txt");
    if (prompt.text != expected) {
      detail = "template mismatch for " + to_string(s);
      return false;
    }
  }
  // Neighbor-joining convention: degraded forms are pinned too.
  const NeighborDescriptions none;
  if (render_prompt(registry, Strategy::eng, item, &none).text !=
          read_file(dir + "eng_degraded.txt") ||
      render_prompt(registry, Strategy::rec_eng, item, &none).text !=
          read_file(dir + "rec_eng_degraded.txt")) {
    detail = "degraded rendering mismatch";
    return false;
  }
  detail = "8 templates byte-exact, plus degraded forms";
  return true;
}

// ---------------------------------------------------------------------------
// 5 & 6. Synthetic-signal experiment: augmentation lifts NDCG, masking the
// planted tokens removes the lift, duplication adds nothing.
// ---------------------------------------------------------------------------

PipelineConfig acceptance_config(const std::string& out_dir) {
  PipelineConfig c;
  c.use_synthetic = true;
  c.synthetic.num_users = 200;
  c.synthetic.num_items = 100;
  c.synthetic.num_genres = 5;
  c.synthetic.min_interactions_per_user = 12;
  c.synthetic.max_interactions_per_user = 20;
  c.synthetic.two_genre_rate = 0.4;
  c.synthetic.off_genre_rate = 0.15;
  c.synthetic.seed = 7;
  c.seeds = {0, 1, 2, 3, 4};
  c.eval_negatives = 50;
  c.train_negative_ratio = 1;
  c.neighbors.T = 3;
  c.provider_kind = "mock";
  c.mock_seed = 11;
  c.encoder_kind = "hash";
  c.encoder_dim = 32;
  c.encoder_seed = 13;
  c.encoder_lexicon_bump = 1.0f;
  c.fusion = fusion_from_string("concat_all");
  c.extra_components = {"para_mask"};
  c.model.user_dim = 32;
  c.model.item_hidden = 64;
  c.model.dropout = 0.1;
  c.model.learning_rate = 0.02;
  c.model.weight_decay = 0.0005;
  c.model.batch_size = 256;
  c.model.max_epochs = 120;
  c.model.eval_every = 5;
  c.model.patience_windows = 6;
  c.model.seed = 1;
  c.k = 10;
  c.ablation_fusions = {"original_only", "single:para_rec", "single:para_mask",
                        "duplication", "concat_all"};
  c.analysis_variants = false;
  c.output_dir = out_dir;
  return c;
}

struct SyntheticOutcome {
  bool ran = false;
  std::map<std::string, AblationCell> cells;
  std::string error;
};

SyntheticOutcome run_synthetic(const std::string& out_dir) {
  SyntheticOutcome out;
  try {
    const auto config = acceptance_config(out_dir);
    stage_ingest(config);
    const auto report = stage_augment(config);
    if (report.failed != 0) {
      out.error = "augmentation failures";
      return out;
    }
    stage_embed(config);
    const auto ablation = stage_ablate(config);
    for (const auto& cell : ablation.cells) out.cells[cell.fusion] = cell;
    out.ran = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

bool criterion_synthetic_signal(const SyntheticOutcome& outcome,
                                std::string& detail) {
  if (!outcome.ran) {
    detail = "pipeline failed: " + outcome.error;
    return false;
  }
  const auto& original = outcome.cells.at("original_only").report;
  const auto& concat_all = outcome.cells.at("concat_all").report;
  const auto& rec = outcome.cells.at("single:para_rec").report;
  const auto& mask = outcome.cells.at("single:para_mask").report;

  std::map<std::uint64_t, double> base_ndcg;
  for (const auto& r : original.per_seed) {
    if (r.failed) {
      detail = "a seed failed in the original-only cell";
      return false;
    }
    base_ndcg[r.seed] = r.test.ndcg;
  }
  double min_gap = 1.0;
  for (const auto& r : concat_all.per_seed) {
    if (r.failed) {
      detail = "a seed failed in the concat_all cell";
      return false;
    }
    min_gap = std::min(min_gap, r.test.ndcg - base_ndcg.at(r.seed));
  }
  if (min_gap < 0.05) {
    std::ostringstream ss;
    ss << "smallest per-seed ndcg gap " << min_gap << " < 0.05";
    detail = ss.str();
    return false;
  }
  if (!(mask.mean.ndcg < rec.mean.ndcg)) {
    std::ostringstream ss;
    ss << "mask mean " << mask.mean.ndcg << " not below rec mean "
       << rec.mean.ndcg;
    detail = ss.str();
    return false;
  }
  std::ostringstream ss;
  ss << "min per-seed concat_all gap " << min_gap << "; mask " << mask.mean.ndcg
     << " < rec " << rec.mean.ndcg;
  detail = ss.str();
  return true;
}

bool criterion_duplication_control(const SyntheticOutcome& outcome,
                                   std::string& detail) {
  if (!outcome.ran) {
    detail = "pipeline failed: " + outcome.error;
    return false;
  }
  const double original = outcome.cells.at("original_only").report.mean.ndcg;
  const double duplication = outcome.cells.at("duplication").report.mean.ndcg;
  std::ostringstream ss;
  ss << "duplication " << duplication << " vs original " << original;
  detail = ss.str();
  return duplication - original <= 0.01;
}

// ---------------------------------------------------------------------------
// 7. Rerunning the full pipeline reproduces results.json byte for byte.
// ---------------------------------------------------------------------------

bool criterion_determinism(std::string& detail) {
  const fs::path root = fs::temp_directory_path() / "textrec_acceptance_det";
  fs::remove_all(root);
  auto config = acceptance_config(root.string());
  config.seeds = {0, 1};
  config.ablation_fusions = {"original_only"};

  run_pipeline(config);
  const auto first = read_file(results_path(config));
  run_pipeline(config);
  const auto second = read_file(results_path(config));
  fs::remove_all(root);
  if (first != second) {
    detail = "results.json differs between runs";
    return false;
  }
  detail = "hash " + content_digest(first);
  return true;
}

// ---------------------------------------------------------------------------
// 8. Report annotation reproduces the +8.54% relative gain.
// ---------------------------------------------------------------------------

bool criterion_relative_gain(std::string& detail) {
  const auto base = load_reference_entry("movielens", "mlp_original");
  const auto best = load_reference_entry("movielens", "concat_all_gpt3");
  const double gain = relative_gain(best.ndcg, base.ndcg);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%+.2f%%", 100.0 * gain);
  detail = std::string("fixtures give ") + buf;
  return std::string(buf) == "+8.54%";
}

}  // namespace

int main() {
  const fs::path synth_root =
      fs::temp_directory_path() / "textrec_acceptance_synth";
  fs::remove_all(synth_root);

  SyntheticOutcome synthetic;
  bool all_passed = true;
  int index = 0;

  std::vector<Criterion> criteria = {
      {"metric-oracle-equivalence", criterion_metric_oracles, 5.0},
      {"ppr-oracle-equivalence", criterion_ppr_oracle, 10.0},
      {"gradient-correctness", criterion_gradients, 30.0},
      {"prompt-golden-files", criterion_prompt_goldens, 30.0},
      {"synthetic-signal-end-to-end",
       [&](std::string& detail) {
         synthetic = run_synthetic(synth_root.string());
         return criterion_synthetic_signal(synthetic, detail);
       },
       300.0},
      {"duplication-control",
       [&](std::string& detail) {
         return criterion_duplication_control(synthetic, detail);
       },
       300.0},
      {"pipeline-determinism", criterion_determinism, 300.0},
      {"relative-gain-arithmetic", criterion_relative_gain, 30.0},
  };

  for (auto& criterion : criteria) {
    ++index;
    std::string detail;
    bool ok = false;
    const auto start = Clock::now();
    try {
      ok = criterion.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(Clock::now() - start).count();
    if (seconds > criterion.limit_seconds) {
      ok = false;
      detail += " [exceeded " + std::to_string(criterion.limit_seconds) +
                "s budget]";
    }
    std::printf("%s  criterion-%d %s (%.2fs) %s\n", ok ? "PASS" : "FAIL",
                index, criterion.name.c_str(), seconds,
                detail.empty() ? "" : ("- " + detail).c_str());
    all_passed &= ok;
  }
  fs::remove_all(synth_root);
  return all_passed ? 0 : 1;
}
