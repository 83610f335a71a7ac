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

#include "textrec/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "textrec/digest.hpp"
#include "textrec/errors.hpp"

namespace textrec {

namespace {

using nlohmann::json;

json to_json(const PipelineConfig& c) {
  json j;
  j["data"] = {
      {"items", c.items_path},
      {"interactions", c.interactions_path},
      {"items_format",
       c.items_format == ItemFileFormat::jsonl ? "jsonl" : "csv"},
      {"min_user_interactions", c.min_user_interactions},
      {"min_item_interactions", c.min_item_interactions},
      {"synthetic",
       {{"enabled", c.use_synthetic},
        {"users", c.synthetic.num_users},
        {"items", c.synthetic.num_items},
        {"genres", c.synthetic.num_genres},
        {"min_interactions", c.synthetic.min_interactions_per_user},
        {"max_interactions", c.synthetic.max_interactions_per_user},
        {"two_genre_rate", c.synthetic.two_genre_rate},
        {"off_genre_rate", c.synthetic.off_genre_rate},
        {"seed", c.synthetic.seed}}},
  };
  j["split"] = {{"ratio", c.split_ratio},
                {"seeds", c.seeds},
                {"eval_negatives", c.eval_negatives},
                {"train_negative_ratio", c.train_negative_ratio}};
  j["neighbors"] = {{"T", c.neighbors.T},
                    {"alpha", c.neighbors.alpha},
                    {"tol", c.neighbors.tol},
                    {"max_iter", c.neighbors.max_iter},
                    {"genre_filter", c.neighbors.genre_filter}};
  json lexicon = json::object();
  for (const auto& [key, tokens] : c.lexicon.tokens_by_key) {
    lexicon[key] = tokens;
  }
  j["provider"] = {{"kind", c.provider_kind},
                   {"model_tag", c.completion.model_tag},
                   {"temperature", c.completion.temperature},
                   {"max_tokens", c.completion.max_tokens},
                   {"top_p", c.completion.top_p},
                   {"frequency_penalty", c.completion.frequency_penalty},
                   {"presence_penalty", c.completion.presence_penalty},
                   {"mock_seed", c.mock_seed},
                   {"base_url", c.http.base_url},
                   {"path", c.http.path},
                   {"api_key_env", c.http.api_key_env},
                   {"timeout_s", c.http.timeout_s},
                   {"jobs", c.jobs},
                   {"signal_lexicon", lexicon}};
  j["encoder"] = {{"kind", c.encoder_kind},
                  {"dim", c.encoder_dim},
                  {"seed", c.encoder_seed},
                  {"lexicon_bump", c.encoder_lexicon_bump}};
  json strategies = json::array();
  for (Strategy s : c.strategies) strategies.push_back(to_string(s));
  j["strategies"] = strategies;
  j["fusion"] = to_string(c.fusion);
  j["extra_components"] = c.extra_components;
  j["keywords_path"] = c.keywords_path;
  j["model"] = {{"user_dim", c.model.user_dim},
                {"item_hidden", c.model.item_hidden},
                {"dropout", c.model.dropout},
                {"learning_rate", c.model.learning_rate},
                {"weight_decay", c.model.weight_decay},
                {"batch_size", c.model.batch_size},
                {"max_epochs", c.model.max_epochs},
                {"eval_every", c.model.eval_every},
                {"patience_windows", c.model.patience_windows},
                {"seed", c.model.seed}};
  j["grid"] = {{"learning_rates", c.grid_learning_rates},
               {"dropouts", c.grid_dropouts}};
  j["eval"] = {{"k", c.k}};
  j["ablation"] = {{"fusions", c.ablation_fusions}};
  j["analysis"] = {{"sample", c.analysis_sample},
                   {"variants", c.analysis_variants}};
  j["output_dir"] = c.output_dir;
  return j;
}

PipelineConfig from_json(const json& j) {
  PipelineConfig c;
  if (j.contains("data")) {
    const auto& d = j["data"];
    c.items_path = d.value("items", c.items_path);
    c.interactions_path = d.value("interactions", c.interactions_path);
    const std::string fmt = d.value("items_format", "jsonl");
    if (fmt == "jsonl") {
      c.items_format = ItemFileFormat::jsonl;
    } else if (fmt == "csv") {
      c.items_format = ItemFileFormat::csv;
    } else {
      throw ConfigError("unknown items_format: " + fmt);
    }
    c.min_user_interactions =
        d.value("min_user_interactions", c.min_user_interactions);
    c.min_item_interactions =
        d.value("min_item_interactions", c.min_item_interactions);
    if (d.contains("synthetic")) {
      const auto& s = d["synthetic"];
      c.use_synthetic = s.value("enabled", false);
      c.synthetic.num_users = s.value("users", c.synthetic.num_users);
      c.synthetic.num_items = s.value("items", c.synthetic.num_items);
      c.synthetic.num_genres = s.value("genres", c.synthetic.num_genres);
      c.synthetic.min_interactions_per_user =
          s.value("min_interactions", c.synthetic.min_interactions_per_user);
      c.synthetic.max_interactions_per_user =
          s.value("max_interactions", c.synthetic.max_interactions_per_user);
      c.synthetic.two_genre_rate =
          s.value("two_genre_rate", c.synthetic.two_genre_rate);
      c.synthetic.off_genre_rate =
          s.value("off_genre_rate", c.synthetic.off_genre_rate);
      c.synthetic.seed = s.value("seed", c.synthetic.seed);
    }
  }
  if (j.contains("split")) {
    const auto& s = j["split"];
    if (s.contains("ratio")) c.split_ratio = s["ratio"].get<std::array<double, 3>>();
    if (s.contains("seeds")) c.seeds = s["seeds"].get<std::vector<std::uint64_t>>();
    c.eval_negatives = s.value("eval_negatives", c.eval_negatives);
    c.train_negative_ratio =
        s.value("train_negative_ratio", c.train_negative_ratio);
  }
  if (j.contains("neighbors")) {
    const auto& n = j["neighbors"];
    c.neighbors.T = n.value("T", c.neighbors.T);
    c.neighbors.alpha = n.value("alpha", c.neighbors.alpha);
    c.neighbors.tol = n.value("tol", c.neighbors.tol);
    c.neighbors.max_iter = n.value("max_iter", c.neighbors.max_iter);
    c.neighbors.genre_filter = n.value("genre_filter", c.neighbors.genre_filter);
  }
  if (j.contains("provider")) {
    const auto& p = j["provider"];
    c.provider_kind = p.value("kind", c.provider_kind);
    c.completion.model_tag = p.value("model_tag", c.completion.model_tag);
    c.completion.temperature = p.value("temperature", c.completion.temperature);
    c.completion.max_tokens = p.value("max_tokens", c.completion.max_tokens);
    c.completion.top_p = p.value("top_p", c.completion.top_p);
    c.completion.frequency_penalty =
        p.value("frequency_penalty", c.completion.frequency_penalty);
    c.completion.presence_penalty =
        p.value("presence_penalty", c.completion.presence_penalty);
    c.mock_seed = p.value("mock_seed", c.mock_seed);
    c.http.base_url = p.value("base_url", c.http.base_url);
    c.http.path = p.value("path", c.http.path);
    c.http.api_key_env = p.value("api_key_env", c.http.api_key_env);
    c.http.timeout_s = p.value("timeout_s", c.http.timeout_s);
    c.jobs = p.value("jobs", c.jobs);
    if (p.contains("signal_lexicon")) {
      for (const auto& [key, tokens] : p["signal_lexicon"].items()) {
        c.lexicon.tokens_by_key[key] = tokens.get<std::vector<std::string>>();
      }
    }
  }
  if (j.contains("encoder")) {
    const auto& e = j["encoder"];
    c.encoder_kind = e.value("kind", c.encoder_kind);
    c.encoder_dim = e.value("dim", c.encoder_dim);
    c.encoder_seed = e.value("seed", c.encoder_seed);
    c.encoder_lexicon_bump = e.value("lexicon_bump", c.encoder_lexicon_bump);
  }
  if (j.contains("strategies")) {
    c.strategies.clear();
    for (const auto& id : j["strategies"]) {
      c.strategies.push_back(strategy_from_string(id.get<std::string>()));
    }
  }
  if (j.contains("fusion")) {
    c.fusion = fusion_from_string(j["fusion"].get<std::string>());
  }
  if (j.contains("extra_components")) {
    c.extra_components = j["extra_components"].get<std::vector<std::string>>();
  }
  c.keywords_path = j.value("keywords_path", c.keywords_path);
  if (j.contains("model")) {
    const auto& m = j["model"];
    c.model.user_dim = m.value("user_dim", c.model.user_dim);
    c.model.item_hidden = m.value("item_hidden", c.model.item_hidden);
    c.model.dropout = m.value("dropout", c.model.dropout);
    c.model.learning_rate = m.value("learning_rate", c.model.learning_rate);
    c.model.weight_decay = m.value("weight_decay", c.model.weight_decay);
    c.model.batch_size = m.value("batch_size", c.model.batch_size);
    c.model.max_epochs = m.value("max_epochs", c.model.max_epochs);
    c.model.eval_every = m.value("eval_every", c.model.eval_every);
    c.model.patience_windows =
        m.value("patience_windows", c.model.patience_windows);
    c.model.seed = m.value("seed", c.model.seed);
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    if (g.contains("learning_rates")) {
      c.grid_learning_rates = g["learning_rates"].get<std::vector<double>>();
    }
    if (g.contains("dropouts")) {
      c.grid_dropouts = g["dropouts"].get<std::vector<double>>();
    }
  }
  if (j.contains("eval")) c.k = j["eval"].value("k", c.k);
  if (j.contains("ablation") && j["ablation"].contains("fusions")) {
    c.ablation_fusions =
        j["ablation"]["fusions"].get<std::vector<std::string>>();
  }
  if (j.contains("analysis")) {
    c.analysis_sample = j["analysis"].value("sample", c.analysis_sample);
    c.analysis_variants = j["analysis"].value("variants", c.analysis_variants);
  }
  c.output_dir = j.value("output_dir", c.output_dir);
  return c;
}

}  // namespace

void PipelineConfig::validate() const {
  if (!use_synthetic && (items_path.empty() || interactions_path.empty())) {
    throw ConfigError("data.items and data.interactions are required unless "
                      "data.synthetic.enabled is true");
  }
  const double sum = split_ratio[0] + split_ratio[1] + split_ratio[2];
  if (std::abs(sum - 1.0) > 1e-9 || split_ratio[0] <= 0 ||
      split_ratio[1] <= 0 || split_ratio[2] <= 0) {
    throw ConfigError("split.ratio must be positive and sum to 1");
  }
  if (seeds.empty()) throw ConfigError("split.seeds must be non-empty");
  if (provider_kind != "mock" &&
      provider_kind != "openai-completions-compatible" &&
      provider_kind != "local-chat-compatible") {
    throw ConfigError("unknown provider kind: " + provider_kind);
  }
  if (encoder_kind != "hash") {
    throw ConfigError("unknown encoder kind: " + encoder_kind);
  }
  if (encoder_dim == 0) throw ConfigError("encoder.dim must be positive");
  if (strategies.empty()) throw ConfigError("strategies must be non-empty");
  if (fusion.kind == FusionKind::single && fusion.component.empty()) {
    throw ConfigError("single fusion needs a component");
  }
  if (k == 0) throw ConfigError("eval.k must be >= 1");
  if (model.user_dim == 0 || model.item_hidden == 0 || model.batch_size == 0) {
    throw ConfigError("model dimensions and batch size must be positive");
  }
  if (model.dropout < 0.0 || model.dropout >= 1.0) {
    throw ConfigError("model.dropout must be in [0, 1)");
  }
  if (model.eval_every == 0 || model.patience_windows == 0) {
    throw ConfigError("model.eval_every and patience_windows must be >= 1");
  }
  if (jobs == 0) throw ConfigError("provider.jobs must be >= 1");
  if (train_negative_ratio == 0) {
    throw ConfigError("split.train_negative_ratio must be >= 1");
  }
  for (const auto& id : ablation_fusions) fusion_from_string(id);
  if (neighbors.alpha <= 0.0 || neighbors.alpha >= 1.0) {
    throw ConfigError("neighbors.alpha must be in (0, 1)");
  }
  if (output_dir.empty()) throw ConfigError("output_dir must be non-empty");
}

std::string PipelineConfig::to_canonical_json() const {
  return to_json(*this).dump(2);
}

std::string PipelineConfig::digest() const {
  // Execution policy (worker cap, artifact location) does not change what
  // the experiment computes, so it stays out of the run identity.
  json j = to_json(*this);
  j["provider"].erase("jobs");
  j.erase("output_dir");
  return content_digest(j.dump());
}

std::string PipelineConfig::run_root() const {
  return output_dir + "/" + digest().substr(0, 12);
}

PipelineConfig PipelineConfig::from_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config is not valid JSON");
  try {
    return from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

void PipelineConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like section.key=value: " +
                      assignment);
  }
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);

  json root = to_json(*this);
  json* node = &root;
  std::stringstream ss(path);
  std::vector<std::string> keys;
  std::string part;
  while (std::getline(ss, part, '.')) keys.push_back(part);
  if (keys.empty()) throw ConfigError("empty override path");
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    node = &(*node)[keys[i]];
  }
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;  // plain string
  (*node)[keys.back()] = value;
  try {
    *this = from_json(root);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("override: ") + e.what());
  }
}

}  // namespace textrec
