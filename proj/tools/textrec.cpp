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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "textrec/config.hpp"
#include "textrec/errors.hpp"
#include "textrec/experiment.hpp"
#include "textrec/synthetic.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartialFailure = 1;
constexpr int kExitConfigError = 2;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  bool dry_run = false;
  bool force = false;
  std::size_t jobs = 0;  // 0 = keep config value
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config_path, "Pipeline config (JSON)")
      ->required();
  cmd->add_option("--set", args.overrides,
                  "Override a config value, e.g. --set model.dropout=0.3 "
                  "(flags win over the file)");
  cmd->add_flag("--dry-run", args.dry_run, "Print planned work and exit");
  cmd->add_flag("--force", args.force, "Skip config-digest checks");
  cmd->add_option("--jobs", args.jobs, "Cap worker threads");
}

textrec::PipelineConfig load_config(const CommonArgs& args) {
  auto config = textrec::PipelineConfig::from_file(args.config_path);
  for (const auto& assignment : args.overrides) {
    config.apply_override(assignment);
  }
  if (args.jobs > 0) config.jobs = args.jobs;
  config.validate();
  return config;
}

textrec::StageOptions stage_options(const CommonArgs& args) {
  textrec::StageOptions opt;
  opt.dry_run = args.dry_run;
  opt.force = args.force;
  opt.log = &std::cout;
  return opt;
}

void print_report(const textrec::MetricsReport& report) {
  std::cout << "protocol: " << report.protocol << "\n";
  for (const auto& r : report.per_seed) {
    if (r.failed) {
      std::cout << "  seed " << r.seed << ": FAILED (" << r.error << ")\n";
    } else {
      std::cout << "  seed " << r.seed << ": precision@" << report.k << " "
                << r.test.precision << "  recall@" << report.k << " "
                << r.test.recall << "  ndcg@" << report.k << " " << r.test.ndcg
                << "\n";
    }
  }
  std::cout << "mean: precision " << report.mean.precision << "  recall "
            << report.mean.recall << "  ndcg " << report.mean.ndcg << "\n"
            << "std:  precision " << report.stddev.precision << "  recall "
            << report.stddev.recall << "  ndcg " << report.stddev.ndcg << "\n";
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const textrec::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const textrec::StaleArtifactError& e) {
    std::cerr << "artifact error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const textrec::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const textrec::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartialFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartialFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Config-driven text-based recommendation pipeline"};
  app.require_subcommand(1);

  CommonArgs ingest_args, augment_args, embed_args, train_args, eval_args,
      ablate_args, analyze_args, run_args;

  auto* ingest = app.add_subcommand(
      "ingest", "Filter and split the corpus, sample negatives");
  add_common(ingest, ingest_args);

  auto* augment = app.add_subcommand(
      "augment", "Compute engagement neighbors and populate the response cache");
  add_common(augment, augment_args);

  auto* embed = app.add_subcommand(
      "embed", "Encode originals and responses into component embeddings");
  add_common(embed, embed_args);

  auto* train =
      app.add_subcommand("train", "Grid-search and train the two-tower model");
  add_common(train, train_args);

  auto* eval = app.add_subcommand("eval", "Rank test candidates, write results.json");
  add_common(eval, eval_args);

  auto* ablate =
      app.add_subcommand("ablate", "Sweep fusion strategies over shared seeds");
  add_common(ablate, ablate_args);

  auto* analyze = app.add_subcommand(
      "analyze", "Keyword, wording-variant and adjective analyses");
  add_common(analyze, analyze_args);

  auto* run = app.add_subcommand("run", "All stages: ingest through eval");
  add_common(run, run_args);

  // Synthetic corpus generation (writes plain data files, no run directory).
  std::string synth_out = "synth";
  textrec::SyntheticSpec synth_spec;
  auto* synth = app.add_subcommand(
      "synth", "Generate a preference corpus with planted genre signal");
  synth->add_option("-o,--out", synth_out, "Output directory");
  synth->add_option("--users", synth_spec.num_users, "User count");
  synth->add_option("--items", synth_spec.num_items, "Item count");
  synth->add_option("--genres", synth_spec.num_genres, "Latent genre count");
  synth->add_option("--seed", synth_spec.seed, "Generator seed");

  CLI11_PARSE(app, argc, argv);

  if (synth->parsed()) {
    return run_guarded([&]() {
      namespace fs = std::filesystem;
      const auto corpus = textrec::make_synthetic_corpus(synth_spec);
      fs::create_directories(synth_out);
      textrec::save_items_jsonl(synth_out + "/items.jsonl", corpus.items);
      textrec::save_interactions_tsv(synth_out + "/interactions.tsv",
                                     corpus.interactions);
      nlohmann::json lex = nlohmann::json::object();
      for (const auto& [k, v] : corpus.lexicon.tokens_by_key) lex[k] = v;
      std::ofstream out(synth_out + "/signal_lexicon.json");
      out << lex.dump(2) << "\n";
      std::cout << "wrote " << corpus.items.size() << " items, "
                << corpus.interactions.size() << " interactions to "
                << synth_out << "\n";
      return kExitOk;
    });
  }

  if (ingest->parsed()) {
    return run_guarded([&]() {
      auto config = load_config(ingest_args);
      textrec::stage_ingest(config, stage_options(ingest_args));
      std::cout << "run directory: " << config.run_root() << "\n";
      return kExitOk;
    });
  }
  if (augment->parsed()) {
    return run_guarded([&]() {
      auto config = load_config(augment_args);
      const auto report =
          textrec::stage_augment(config, stage_options(augment_args));
      std::cout << "requested " << report.requested << ", cache hits "
                << report.cached_hits << ", generated " << report.generated
                << ", failed " << report.failed << "\n";
      for (const auto& f : report.failures) std::cerr << "  " << f << "\n";
      return report.failed == 0 ? kExitOk : kExitPartialFailure;
    });
  }
  if (embed->parsed()) {
    return run_guarded([&]() {
      auto config = load_config(embed_args);
      textrec::stage_embed(config, stage_options(embed_args));
      return kExitOk;
    });
  }
  if (train->parsed()) {
    return run_guarded([&]() {
      auto config = load_config(train_args);
      textrec::stage_train(config, stage_options(train_args));
      return kExitOk;
    });
  }
  if (eval->parsed()) {
    return run_guarded([&]() {
      auto config = load_config(eval_args);
      const auto report = textrec::stage_eval(config, stage_options(eval_args));
      if (!eval_args.dry_run) {
        print_report(report);
        std::cout << "results: " << textrec::results_path(config) << "\n";
      }
      return report.complete ? kExitOk : kExitPartialFailure;
    });
  }
  if (ablate->parsed()) {
    return run_guarded([&]() {
      auto config = load_config(ablate_args);
      const auto result =
          textrec::stage_ablate(config, stage_options(ablate_args));
      bool partial = false;
      for (const auto& cell : result.cells) {
        std::cout << cell.fusion << ": ndcg " << cell.report.mean.ndcg << " ("
                  << (cell.ndcg_gain_vs_base >= 0 ? "+" : "")
                  << cell.ndcg_gain_vs_base * 100.0 << "% vs "
                  << result.base_fusion << ")\n";
        partial |= !cell.report.complete;
      }
      if (!ablate_args.dry_run) {
        std::cout << "table: " << textrec::ablation_csv_path(config) << "\n";
      }
      return partial ? kExitPartialFailure : kExitOk;
    });
  }
  if (analyze->parsed()) {
    return run_guarded([&]() {
      auto config = load_config(analyze_args);
      textrec::stage_analyze(config, stage_options(analyze_args));
      return kExitOk;
    });
  }
  if (run->parsed()) {
    return run_guarded([&]() {
      auto config = load_config(run_args);
      const auto report = textrec::run_pipeline(config, stage_options(run_args));
      if (!run_args.dry_run) print_report(report);
      return report.complete ? kExitOk : kExitPartialFailure;
    });
  }
  return kExitOk;
}
