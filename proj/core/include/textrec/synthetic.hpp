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

#include "textrec/augment.hpp"
#include "textrec/types.hpp"

namespace textrec {

/// Parameters of the generated preference corpus. Each user favors one or
/// two latent genres; interactions are drawn mostly from the preferred
/// genres with a configurable noise rate. Item descriptions are genre-free
/// word salad, so genre signal reaches the features only through the
/// mock provider's lexicon plants.
struct SyntheticSpec {
  std::size_t num_users = 200;
  std::size_t num_items = 100;
  std::size_t num_genres = 5;
  std::size_t min_interactions_per_user = 12;
  std::size_t max_interactions_per_user = 20;
  double two_genre_rate = 0.4;   // fraction of users preferring two genres
  double off_genre_rate = 0.15;  // chance an interaction ignores preference
  std::uint64_t seed = 7;
};

struct SyntheticCorpus {
  std::vector<ItemRecord> items;
  std::vector<Interaction> interactions;
  SignalLexicon lexicon;  // two planted tokens per genre
};

SyntheticCorpus make_synthetic_corpus(const SyntheticSpec& spec);

}  // namespace textrec
