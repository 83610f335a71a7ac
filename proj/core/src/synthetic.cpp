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

#include "textrec/synthetic.hpp"

#include <cstdio>
#include <set>

#include "textrec/errors.hpp"
#include "textrec/rng.hpp"

namespace textrec {

namespace {

std::string padded_id(const char* prefix, std::size_t i, std::size_t width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*zu", prefix, static_cast<int>(width), i);
  return buf;
}

}  // namespace

SyntheticCorpus make_synthetic_corpus(const SyntheticSpec& spec) {
  if (spec.num_genres == 0 || spec.num_items < spec.num_genres) {
    throw ConfigError("need at least one item per genre");
  }
  if (spec.min_interactions_per_user > spec.max_interactions_per_user) {
    throw ConfigError("min_interactions_per_user exceeds max");
  }
  SyntheticCorpus corpus;

  std::vector<std::string> genre_names;
  for (std::size_t g = 0; g < spec.num_genres; ++g) {
    genre_names.push_back("g" + std::to_string(g));
    corpus.lexicon.tokens_by_key[genre_names.back()] = {
        "sig" + std::to_string(g) + "a", "sig" + std::to_string(g) + "b"};
  }

  std::vector<std::vector<std::size_t>> items_by_genre(spec.num_genres);
  Rng desc_rng(child_seed(spec.seed, "descriptions"));
  for (std::size_t i = 0; i < spec.num_items; ++i) {
    const std::size_t genre = i % spec.num_genres;
    ItemRecord item;
    item.item_id = padded_id("i", i, 3);
    item.metadata["genres"] = genre_names[genre];
    item.metadata["title"] = "item " + std::to_string(i);
    std::string desc = "story";
    for (int w = 0; w < 9; ++w) {
      desc += " w" + std::to_string(desc_rng.uniform_index(5000));
    }
    item.description = desc;
    items_by_genre[genre].push_back(i);
    corpus.items.push_back(std::move(item));
  }

  for (std::size_t u = 0; u < spec.num_users; ++u) {
    const std::string user_id = padded_id("u", u, 3);
    Rng rng(child_seed(spec.seed, "user/" + user_id));
    std::set<std::size_t> preferred;
    preferred.insert(rng.uniform_index(spec.num_genres));
    if (rng.uniform01() < spec.two_genre_rate && spec.num_genres > 1) {
      std::size_t second = rng.uniform_index(spec.num_genres);
      while (preferred.count(second)) second = rng.uniform_index(spec.num_genres);
      preferred.insert(second);
    }
    std::vector<std::size_t> preferred_items;
    for (std::size_t g : preferred) {
      preferred_items.insert(preferred_items.end(), items_by_genre[g].begin(),
                             items_by_genre[g].end());
    }
    const std::size_t span =
        spec.max_interactions_per_user - spec.min_interactions_per_user + 1;
    const std::size_t want =
        spec.min_interactions_per_user + rng.uniform_index(span);
    std::set<std::size_t> chosen;
    std::size_t guard = 0;
    while (chosen.size() < want && guard++ < want * 50) {
      std::size_t item;
      if (rng.uniform01() < spec.off_genre_rate || preferred_items.empty()) {
        item = rng.uniform_index(spec.num_items);
      } else {
        item = preferred_items[rng.uniform_index(preferred_items.size())];
      }
      chosen.insert(item);
    }
    for (std::size_t i : chosen) {
      corpus.interactions.push_back(
          Interaction{user_id, corpus.items[i].item_id, 1, -1});
    }
  }
  return corpus;
}

}  // namespace textrec
