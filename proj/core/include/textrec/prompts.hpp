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
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "textrec/types.hpp"

namespace textrec {

// The eight augmentation strategies. para/tag/infer restate the description
// itself; the _rec variants add a recommendation instruction; eng summarizes
// the target together with its engagement neighbors; rec_eng combines both.
enum class Strategy {
  para,
  tag,
  infer,
  para_rec,
  tag_rec,
  infer_rec,
  eng,
  rec_eng,
};

enum class Family { basic, rec, eng, rec_eng };

inline constexpr std::array<Strategy, 8> kAllStrategies = {
    Strategy::para,    Strategy::tag,     Strategy::infer,
    Strategy::para_rec, Strategy::tag_rec, Strategy::infer_rec,
    Strategy::eng,     Strategy::rec_eng,
};

Family family_of(Strategy s);
bool needs_neighbors(Strategy s);  // true for eng and rec_eng
const std::string& to_string(Strategy s);
Strategy strategy_from_string(const std::string& id);
const std::string& to_string(Family f);

struct RenderedPrompt {
  Strategy strategy = Strategy::para;
  std::string item_id;
  std::string text;
  std::vector<std::string> neighbor_ids;  // score order; empty for basic/rec
  std::string variant_tag;                // empty = canonical wording
  bool degraded = false;  // eng-family prompt rendered without neighbors
};

/// Template store: one canonical wording per strategy plus registered
/// variants. Templates use the {description} slot and, for eng-family
/// strategies, a '{neighbors}' slot whose quotes come from the template;
/// neighbor descriptions are joined with "'; '" in score order.
class PromptRegistry {
 public:
  /// Registry holding only the eight canonical templates.
  static PromptRegistry canonical();
  /// Canonical templates plus one rewording per strategy under tag "v1".
  static PromptRegistry with_default_variants();

  void register_variant(Strategy s, const std::string& template_text,
                        const std::string& variant_tag);
  const std::string& template_for(Strategy s,
                                  const std::string& variant_tag = "") const;
  std::vector<std::string> variant_tags(Strategy s) const;

  void save(const std::string& path) const;
  static PromptRegistry load(const std::string& path);

 private:
  // (strategy, variant_tag) -> template; tag "" is the canonical wording.
  std::map<std::pair<Strategy, std::string>, std::string> templates_;
};

/// Neighbor descriptions in NeighborSet score order.
using NeighborDescriptions = std::vector<std::pair<std::string, std::string>>;

/// Instantiates the template for (strategy, variant_tag). Eng-family
/// strategies require a neighbors argument; an empty list degrades the
/// prompt to its target-only form and sets degraded=true.
RenderedPrompt render_prompt(const PromptRegistry& registry, Strategy strategy,
                             const ItemRecord& item,
                             const NeighborDescriptions* neighbors = nullptr,
                             const std::string& variant_tag = "");

/// Single-sentence summary request used to bootstrap descriptions for
/// title-only corpora.
std::string render_bootstrap_description(const std::string& title);

}  // namespace textrec
