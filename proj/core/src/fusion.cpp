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

#include "textrec/fusion.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "textrec/errors.hpp"

namespace textrec {

std::string to_string(const FusionStrategy& s) {
  switch (s.kind) {
    case FusionKind::original_only:
      return "original_only";
    case FusionKind::single:
      return "single:" + s.component;
    case FusionKind::concat_basic:
      return "concat_basic";
    case FusionKind::concat_rec:
      return "concat_rec";
    case FusionKind::concat_all:
      return "concat_all";
    case FusionKind::duplication:
      return "duplication";
    case FusionKind::text_concat:
      return "text_concat";
  }
  throw Error("unreachable fusion kind");
}

FusionStrategy fusion_from_string(const std::string& id) {
  if (id == "original_only") return {FusionKind::original_only, ""};
  if (id == "concat_basic") return {FusionKind::concat_basic, ""};
  if (id == "concat_rec") return {FusionKind::concat_rec, ""};
  if (id == "concat_all") return {FusionKind::concat_all, ""};
  if (id == "duplication") return {FusionKind::duplication, ""};
  if (id == "text_concat") return {FusionKind::text_concat, ""};
  if (id.rfind("single:", 0) == 0) {
    const std::string component = id.substr(7);
    if (component.empty()) throw ConfigError("single fusion needs a component");
    return {FusionKind::single, component};
  }
  throw ConfigError("unknown fusion strategy: " + id);
}

const std::vector<std::string>& canonical_component_order() {
  static const std::vector<std::string> order = {
      "original", "para",    "tag", "infer",  "para_rec",
      "tag_rec",  "infer_rec", "eng", "rec_eng"};
  return order;
}

std::vector<std::string> components_for(const FusionStrategy& s) {
  switch (s.kind) {
    case FusionKind::original_only:
      return {"original"};
    case FusionKind::single:
      return {"original", s.component};
    case FusionKind::concat_basic:
      return {"original", "para", "tag", "infer"};
    case FusionKind::concat_rec:
      return {"original", "para_rec", "tag_rec", "infer_rec"};
    case FusionKind::concat_all:
      return canonical_component_order();
    case FusionKind::duplication:
      return std::vector<std::string>(canonical_component_order().size(),
                                      "original");
    case FusionKind::text_concat:
      return {"text_concat"};
  }
  throw Error("unreachable fusion kind");
}

FusedVector fuse(const FusionStrategy& strategy,
                 const std::map<std::string, std::vector<float>>& components) {
  FusedVector out;
  std::size_t offset = 0;
  for (const auto& name : components_for(strategy)) {
    auto it = components.find(name);
    if (it == components.end()) {
      throw MissingComponentError("fusion " + to_string(strategy) +
                                  " is missing component: " + name);
    }
    out.values.insert(out.values.end(), it->second.begin(), it->second.end());
    out.layout.push_back(LayoutEntry{name, offset, it->second.size()});
    offset += it->second.size();
  }
  return out;
}

std::vector<float> duplication_baseline(const std::vector<float>& original,
                                        std::size_t target_components) {
  if (target_components < 1) {
    throw ConfigError("duplication needs at least one component");
  }
  std::vector<float> out;
  out.reserve(original.size() * target_components);
  for (std::size_t i = 0; i < target_components; ++i) {
    out.insert(out.end(), original.begin(), original.end());
  }
  return out;
}

std::vector<float> text_concat_baseline(const TextEncoder& encoder,
                                        const std::string& original_text,
                                        const std::vector<std::string>& responses) {
  std::string joined = original_text;
  for (const auto& r : responses) {
    joined += '\n';
    joined += r;
  }
  return encoder.encode(joined);
}

std::vector<float> ComponentTable::component_of(
    std::size_t item_index, const std::string& component) const {
  auto it = std::find(components.begin(), components.end(), component);
  if (it == components.end()) {
    throw MissingComponentError("table has no component: " + component);
  }
  const auto block = static_cast<std::size_t>(it - components.begin());
  const float* start = data.data() + item_index * row_width() + block * dim;
  return std::vector<float>(start, start + dim);
}

std::map<std::string, std::vector<float>> ComponentTable::components_of(
    std::size_t item_index) const {
  std::map<std::string, std::vector<float>> out;
  for (const auto& c : components) out[c] = component_of(item_index, c);
  return out;
}

void save_embeddings(const std::string& base_path, const ComponentTable& table,
                     const std::string& config_digest) {
  {
    std::ofstream out(base_path + ".f32", std::ios::binary);
    if (!out) throw Error("cannot write embeddings: " + base_path + ".f32");
    out.write(reinterpret_cast<const char*>(table.data.data()),
              static_cast<std::streamsize>(table.data.size() * sizeof(float)));
  }
  nlohmann::json j;
  j["dim"] = table.dim;
  j["order"] = table.item_ids;
  auto layout = nlohmann::json::array();
  for (std::size_t i = 0; i < table.components.size(); ++i) {
    layout.push_back({{"component", table.components[i]},
                      {"offset", i * table.dim},
                      {"length", table.dim}});
  }
  j["components"] = layout;
  if (!config_digest.empty()) j["config_digest"] = config_digest;
  std::ofstream out(base_path + ".index.json");
  if (!out) throw Error("cannot write index: " + base_path + ".index.json");
  out << j.dump(2) << "\n";
}

ComponentTable load_embeddings(const std::string& base_path,
                               std::string* config_digest) {
  std::ifstream idx(base_path + ".index.json");
  if (!idx) throw ParseError("cannot open index: " + base_path + ".index.json");
  nlohmann::json j;
  idx >> j;
  ComponentTable table;
  table.dim = j.at("dim").get<std::size_t>();
  table.item_ids = j.at("order").get<std::vector<std::string>>();
  for (const auto& entry : j.at("components")) {
    table.components.push_back(entry.at("component").get<std::string>());
  }
  if (config_digest) *config_digest = j.value("config_digest", "");

  std::ifstream in(base_path + ".f32", std::ios::binary);
  if (!in) throw ParseError("cannot open embeddings: " + base_path + ".f32");
  const std::size_t expected = table.item_ids.size() * table.row_width();
  table.data.resize(expected);
  in.read(reinterpret_cast<char*>(table.data.data()),
          static_cast<std::streamsize>(expected * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) != expected * sizeof(float)) {
    throw ParseError("embeddings file truncated: " + base_path + ".f32");
  }
  return table;
}

}  // namespace textrec
