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

#include "textrec/experiment.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "textrec/errors.hpp"

using namespace textrec;

namespace {

namespace fs = std::filesystem;

PipelineConfig tiny_config(const std::string& out_dir) {
  PipelineConfig c;
  c.use_synthetic = true;
  c.synthetic.num_users = 30;
  c.synthetic.num_items = 40;
  c.synthetic.num_genres = 3;
  c.synthetic.min_interactions_per_user = 8;
  c.synthetic.max_interactions_per_user = 10;
  c.synthetic.seed = 5;
  c.seeds = {0, 1};
  c.eval_negatives = 8;
  c.neighbors.T = 2;
  c.encoder_dim = 12;
  c.model.user_dim = 8;
  c.model.item_hidden = 16;
  c.model.learning_rate = 0.02;
  c.model.batch_size = 128;
  c.model.max_epochs = 15;
  c.model.eval_every = 5;
  c.model.patience_windows = 2;
  c.model.seed = 1;
  c.analysis_sample = 5;
  c.ablation_fusions = {"original_only", "concat_rec"};
  c.output_dir = out_dir;
  return c;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "cannot read ", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("relative gain reproduces the +8.54% reference annotation") {
  CHECK(relative_gain(0.3951, 0.3640) ==
        doctest::Approx(0.0854).epsilon(1e-3));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%+.2f%%",
                100.0 * relative_gain(0.3951, 0.3640));
  CHECK(std::string(buf) == "+8.54%");
  CHECK_THROWS_AS(relative_gain(1.0, 0.0), ConfigError);
}

TEST_CASE("reference fixtures ship the annotation rows") {
  const auto base = load_reference_entry("movielens", "mlp_original");
  const auto best = load_reference_entry("movielens", "concat_all_gpt3");
  CHECK(base.ndcg == doctest::Approx(0.3640));
  CHECK(best.ndcg == doctest::Approx(0.3951));
  const auto pop = load_reference_entry("recipe", "item_popularity");
  CHECK(pop.precision == doctest::Approx(0.0116));
  CHECK_THROWS_AS(load_reference_entry("movielens", "not_a_row"), ConfigError);
}

TEST_CASE("aggregation is the arithmetic mean with sample std") {
  std::vector<SeedResult> rows(3);
  rows[0].seed = 0;
  rows[0].test = {0.2, 0.4, 0.6, 10};
  rows[1].seed = 1;
  rows[1].test = {0.4, 0.6, 0.8, 10};
  rows[2].seed = 2;
  rows[2].test = {0.6, 0.8, 1.0, 10};
  const auto report = aggregate_seed_results(rows, 10);
  CHECK(report.mean.ndcg == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(report.mean.precision == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(report.stddev.ndcg == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(report.complete);

  SUBCASE("failed seeds flag the report as incomplete") {
    rows[1].failed = true;
    rows[1].error = "boom";
    const auto partial = aggregate_seed_results(rows, 10);
    CHECK_FALSE(partial.complete);
    CHECK(partial.mean.ndcg == doctest::Approx(0.8).epsilon(1e-12));
  }
}

TEST_CASE("staged pipeline produces coherent artifacts") {
  TempDir tmp("textrec_stage_test");
  const auto config = tiny_config(tmp.path.string());
  StageOptions opt;

  stage_ingest(config, opt);
  const fs::path root = config.run_root();
  CHECK(fs::exists(root / "manifest.json"));
  CHECK(fs::exists(root / "data" / "items.jsonl"));
  CHECK(fs::exists(root / "splits" / "split_0.tsv"));
  CHECK(fs::exists(root / "splits" / "candidates_1.jsonl"));

  const auto report = stage_augment(config, opt);
  CHECK(report.failed == 0);
  // 40 items x 8 strategies x (canonical + v1 variants) x 2 seeds.
  CHECK(report.generated == 40 * 8 * 2 * 2);
  CHECK(fs::exists(root / "cache" / "aug_0.jsonl"));
  CHECK(fs::exists(root / "neighbors" / "neighbors_1.jsonl"));

  stage_embed(config, opt);
  CHECK(fs::exists(root / "embeddings" / "emb_0.f32"));

  stage_train(config, opt);
  CHECK(fs::exists(root / "models" / "model_0.ckpt"));
  CHECK(fs::exists(root / "models" / "history_1.csv"));

  const auto metrics = stage_eval(config, opt);
  CHECK(metrics.complete);
  CHECK(metrics.per_seed.size() == 2);
  CHECK(fs::exists(root / "results.json"));

  SUBCASE("augment rerun is pure cache hits") {
    const auto again = stage_augment(config, opt);
    CHECK(again.generated == 0);
    CHECK(again.cached_hits == report.generated);
  }
  SUBCASE("results embed the config digest") {
    const auto text = slurp((root / "results.json").string());
    CHECK(text.find(config.digest()) != std::string::npos);
  }
  SUBCASE("a tampered manifest is refused unless forced") {
    const auto manifest_path = (root / "manifest.json").string();
    const auto original_manifest = slurp(manifest_path);
    {
      std::ofstream out(manifest_path);
      out << R"({"config_digest": "0000000000000000"})" << "\n";
    }
    CHECK_THROWS_AS(stage_embed(config, opt), StaleArtifactError);
    StageOptions forced;
    forced.force = true;
    CHECK_NOTHROW(stage_embed(config, forced));
    std::ofstream out(manifest_path);
    out << original_manifest;
  }
  SUBCASE("analyze writes its reports") {
    stage_analyze(config, opt);
    CHECK(fs::exists(root / "analysis" / "keyword_candidates.csv"));
    CHECK(fs::exists(root / "analysis" / "variant_similarity.json"));
    CHECK(fs::exists(root / "analysis" / "adjective_increase.json"));
  }
  SUBCASE("ablation sweeps cells over shared seeds") {
    const auto ablation = stage_ablate(config, opt);
    REQUIRE(ablation.cells.size() == 2);
    CHECK(ablation.base_fusion == "original_only");
    CHECK(ablation.cells[0].ndcg_gain_vs_base == 0.0);
    CHECK(fs::exists(root / "ablation.csv"));
    const auto csv = slurp((root / "ablation.csv").string());
    CHECK(csv.find("concat_rec") != std::string::npos);
  }
}

TEST_CASE("stages demand their upstream artifacts") {
  TempDir tmp("textrec_stale_test");
  const auto config = tiny_config(tmp.path.string());
  CHECK_THROWS_AS(stage_embed(config), StaleArtifactError);
  CHECK_THROWS_AS(stage_train(config), StaleArtifactError);
  CHECK_THROWS_AS(stage_eval(config), StaleArtifactError);
}

TEST_CASE("dry run plans without writing") {
  TempDir tmp("textrec_dry_test");
  const auto config = tiny_config(tmp.path.string());
  std::ostringstream log;
  StageOptions opt;
  opt.dry_run = true;
  opt.log = &log;
  stage_ingest(config, opt);
  CHECK_FALSE(fs::exists(fs::path(config.run_root()) / "manifest.json"));
  CHECK(log.str().find("ingest") != std::string::npos);
}

TEST_CASE("full pipeline is deterministic across reruns") {
  TempDir tmp("textrec_determinism_test");
  auto config = tiny_config(tmp.path.string());
  config.seeds = {0};
  config.analysis_variants = false;

  const auto first = run_pipeline(config);
  const auto bytes_first = slurp(results_path(config));
  const auto second = run_pipeline(config);
  const auto bytes_second = slurp(results_path(config));
  CHECK(bytes_first == bytes_second);
  CHECK(first.mean.ndcg == second.mean.ndcg);
}

}  // TEST_SUITE
