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

#include "textrec/prompts.hpp"

#include <fstream>

#include <json.hpp>

#include "textrec/errors.hpp"

namespace textrec {

namespace {

constexpr const char* kDescriptionSlot = "{description}";
constexpr const char* kNeighborSlot = "'{neighbors}'";

const std::map<Strategy, std::string>& canonical_templates() {
  static const std::map<Strategy, std::string> t = {
      {Strategy::para,
       "The description of an item is as follows '{description}', paraphrase "
       "it."},
      {Strategy::tag,
       "The description of an item is as follows '{description}', summarize "
       "it with tags."},
      {Strategy::infer,
       "The description of an item is as follows '{description}', what kind "
       "of emotions can it evoke?"},
      {Strategy::para_rec,
       "The description of an item is as follows '{description}', what else "
       "should I say if I want to recommend it to others?"},
      {Strategy::tag_rec,
       "The description of an item is as follows '{description}', what tags "
       "should I use if I want to recommend it to others?"},
      {Strategy::infer_rec,
       "The description of an item is as follows '{description}', recommend "
       "it to others with a focus on the emotions it can evoke."},
      {Strategy::eng,
       "Summarize the commonalities among the following descriptions: "
       "'{description}'; '{neighbors}'."},
      {Strategy::rec_eng,
       "The description of an item is as follows: '{description}'. What else "
       "should I say if I want to recommend it to others? This content is "
       "considered to hold some similar attractive characteristics as the "
       "following descriptions: '{neighbors}'."},
  };
  return t;
}

const std::map<Strategy, std::string>& default_variant_templates() {
  static const std::map<Strategy, std::string> t = {
      {Strategy::para,
       "Summarize the given item description, '{description}', using "
       "different words."},
      {Strategy::tag,
       "Condense the provided item description '{description}' using tags."},
      {Strategy::infer,
       "Based on the description '{description}', what emotions might it "
       "elicit?"},
      {Strategy::para_rec,
       "In addition to the description '{description}', what other details "
       "would you include to endorse it to others?"},
      {Strategy::tag_rec,
       "If you aim to recommend '{description}' to others, what tags or "
       "terms would you use?"},
      {Strategy::infer_rec,
       "Using the description '{description}', endorse this item to others "
       "while emphasizing the emotions it can inspire."},
      {Strategy::eng,
       "Outline the shared characteristics of the following descriptions: "
       "'{description}' and '{neighbors}'."},
      {Strategy::rec_eng,
       "If you wish to recommend '{description}' to others, what other "
       "details would you provide? This content possesses certain akin "
       "attractive attributes as the following descriptions: '{neighbors}'."},
  };
  return t;
}

bool replace_first(std::string& text, std::string_view slot,
                   std::string_view value) {
  const auto pos = text.find(slot);
  if (pos == std::string::npos) return false;
  text.replace(pos, slot.size(), value);
  return true;
}

// Drops the neighbor slot from a template, for items with no neighbors.
// If the instruction text before the slot already closed a sentence, cut
// there; otherwise trim the dangling separator and keep the tail.
std::string degrade_template(const std::string& template_text) {
  const auto slot_pos = template_text.find(kNeighborSlot);
  if (slot_pos == std::string::npos) return template_text;
  std::string prefix = template_text.substr(0, slot_pos);
  const std::string suffix =
      template_text.substr(slot_pos + std::string(kNeighborSlot).size());

  std::size_t cut = std::string::npos;
  for (std::size_t i = 0; i + 1 < prefix.size(); ++i) {
    const char c = prefix[i];
    if ((c == '.' || c == '?' || c == '!') && prefix[i + 1] == ' ') cut = i;
  }
  if (cut != std::string::npos) return prefix.substr(0, cut + 1);

  while (!prefix.empty()) {
    const char c = prefix.back();
    if (c == ' ' || c == ';' || c == ':' || c == ',') {
      prefix.pop_back();
    } else {
      break;
    }
  }
  return prefix + suffix;
}

}  // namespace

Family family_of(Strategy s) {
  switch (s) {
    case Strategy::para:
    case Strategy::tag:
    case Strategy::infer:
      return Family::basic;
    case Strategy::para_rec:
    case Strategy::tag_rec:
    case Strategy::infer_rec:
      return Family::rec;
    case Strategy::eng:
      return Family::eng;
    case Strategy::rec_eng:
      return Family::rec_eng;
  }
  throw Error("unreachable strategy");
}

bool needs_neighbors(Strategy s) {
  const Family f = family_of(s);
  return f == Family::eng || f == Family::rec_eng;
}

const std::string& to_string(Strategy s) {
  static const std::map<Strategy, std::string> names = {
      {Strategy::para, "para"},           {Strategy::tag, "tag"},
      {Strategy::infer, "infer"},         {Strategy::para_rec, "para_rec"},
      {Strategy::tag_rec, "tag_rec"},     {Strategy::infer_rec, "infer_rec"},
      {Strategy::eng, "eng"},             {Strategy::rec_eng, "rec_eng"},
  };
  return names.at(s);
}

Strategy strategy_from_string(const std::string& id) {
  for (Strategy s : kAllStrategies) {
    if (to_string(s) == id) return s;
  }
  throw ConfigError("unknown prompt strategy: " + id);
}

const std::string& to_string(Family f) {
  static const std::map<Family, std::string> names = {
      {Family::basic, "basic"},
      {Family::rec, "rec"},
      {Family::eng, "eng"},
      {Family::rec_eng, "rec_eng"},
  };
  return names.at(f);
}

PromptRegistry PromptRegistry::canonical() {
  PromptRegistry r;
  for (const auto& [s, tmpl] : canonical_templates()) {
    r.templates_[{s, ""}] = tmpl;
  }
  return r;
}

PromptRegistry PromptRegistry::with_default_variants() {
  PromptRegistry r = canonical();
  for (const auto& [s, tmpl] : default_variant_templates()) {
    r.register_variant(s, tmpl, "v1");
  }
  return r;
}

void PromptRegistry::register_variant(Strategy s,
                                      const std::string& template_text,
                                      const std::string& variant_tag) {
  if (variant_tag.empty()) {
    throw BadTemplateError("variant tag must be non-empty");
  }
  if (template_text.find(kDescriptionSlot) == std::string::npos) {
    throw BadTemplateError("template is missing the {description} slot");
  }
  if (needs_neighbors(s) &&
      template_text.find(kNeighborSlot) == std::string::npos) {
    throw BadTemplateError(
        "engagement template is missing the '{neighbors}' slot");
  }
  templates_[{s, variant_tag}] = template_text;
}

const std::string& PromptRegistry::template_for(
    Strategy s, const std::string& variant_tag) const {
  auto it = templates_.find({s, variant_tag});
  if (it == templates_.end()) {
    throw BadTemplateError("no template registered for " + to_string(s) +
                           (variant_tag.empty() ? "" : "/" + variant_tag));
  }
  return it->second;
}

std::vector<std::string> PromptRegistry::variant_tags(Strategy s) const {
  std::vector<std::string> out;
  for (const auto& [key, _] : templates_) {
    if (key.first == s && !key.second.empty()) out.push_back(key.second);
  }
  return out;
}

void PromptRegistry::save(const std::string& path) const {
  nlohmann::json j;
  j["version"] = 1;
  nlohmann::json strategies = nlohmann::json::object();
  for (Strategy s : kAllStrategies) {
    nlohmann::json entry;
    entry["canonical"] = template_for(s);
    nlohmann::json variants = nlohmann::json::object();
    for (const auto& tag : variant_tags(s)) {
      variants[tag] = template_for(s, tag);
    }
    entry["variants"] = variants;
    strategies[to_string(s)] = entry;
  }
  j["strategies"] = strategies;
  std::ofstream out(path);
  if (!out) throw Error("cannot write prompt registry: " + path);
  out << j.dump(2) << "\n";
}

PromptRegistry PromptRegistry::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open prompt registry: " + path);
  nlohmann::json j;
  in >> j;
  PromptRegistry r;
  for (const auto& [id, entry] : j.at("strategies").items()) {
    const Strategy s = strategy_from_string(id);
    r.templates_[{s, ""}] = entry.at("canonical").get<std::string>();
    for (const auto& [tag, tmpl] : entry.at("variants").items()) {
      r.register_variant(s, tmpl.get<std::string>(), tag);
    }
  }
  return r;
}

RenderedPrompt render_prompt(const PromptRegistry& registry, Strategy strategy,
                             const ItemRecord& item,
                             const NeighborDescriptions* neighbors,
                             const std::string& variant_tag) {
  if (item.description.empty()) {
    throw EmptyDescriptionError("item " + item.item_id +
                                " has an empty description");
  }
  RenderedPrompt out;
  out.strategy = strategy;
  out.item_id = item.item_id;
  out.variant_tag = variant_tag;

  std::string text = registry.template_for(strategy, variant_tag);
  std::string joined;
  if (needs_neighbors(strategy)) {
    if (neighbors == nullptr) {
      throw MissingNeighborsError("strategy " + to_string(strategy) +
                                  " requires a neighbor set for item " +
                                  item.item_id);
    }
    if (neighbors->empty()) {
      text = degrade_template(text);
      out.degraded = true;
    } else {
      for (std::size_t i = 0; i < neighbors->size(); ++i) {
        if (i) joined += "'; '";
        joined += (*neighbors)[i].second;
        out.neighbor_ids.push_back((*neighbors)[i].first);
      }
    }
  }
  // Substitute the rightmost slot first so positions located on the raw
  // template stay valid and substituted text is never rescanned.
  if (!out.degraded && needs_neighbors(strategy) &&
      text.find("{neighbors}") < text.find(kDescriptionSlot)) {
    replace_first(text, kDescriptionSlot, item.description);
    replace_first(text, "{neighbors}", joined);
  } else {
    if (!out.degraded && needs_neighbors(strategy)) {
      replace_first(text, "{neighbors}", joined);
    }
    replace_first(text, kDescriptionSlot, item.description);
  }
  out.text = std::move(text);
  return out;
}

std::string render_bootstrap_description(const std::string& title) {
  if (title.empty()) throw EmptyTitleError("bootstrap title must be non-empty");
  return "Summarize the movie " + title +
         " with one sentence. The answer cannot include the movie title.";
}

}  // namespace textrec
