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
#include <cstdint>
#include <string>
#include <vector>

#include "textrec/types.hpp"

namespace textrec {

enum class ItemFileFormat { jsonl, csv };

/// Parses an item file. Required columns/keys: item_id, description; every
/// other column lands in metadata. Duplicate item_id raises
/// DuplicateIdError, malformed rows raise ParseError with the line number.
std::vector<ItemRecord> load_items(const std::string& path,
                                   ItemFileFormat format);

void save_items_jsonl(const std::string& path,
                      const std::vector<ItemRecord>& items);

/// Tab-separated ratings with header row: user_id, item_id, rating,
/// timestamp (timestamp optional).
std::vector<RatingRecord> load_interactions_tsv(const std::string& path);

void save_interactions_tsv(const std::string& path,
                           const std::vector<Interaction>& interactions);

/// Rating magnitude is discarded: every rated (user, item) pair becomes a
/// single label-1 interaction, duplicates collapsed (earliest timestamp kept).
std::vector<Interaction> to_implicit(const std::vector<RatingRecord>& ratings);

/// Removes low-activity users/items, iterating to a fixed point since each
/// removal pass can push the other side below its threshold.
std::vector<Interaction> filter_by_activity(std::vector<Interaction> interactions,
                                            std::size_t min_user,
                                            std::size_t min_item);

/// Seed-deterministic partition of the positive interactions. Ratio
/// components must be positive and sum to 1; InsufficientDataError if any
/// part would be empty.
DatasetSplit split_dataset(const std::vector<Interaction>& positives,
                           std::array<double, 3> ratio, std::uint64_t seed);

/// Draws n evaluation negatives per user of the validation/test parts,
/// uniformly without replacement from catalog items the user never
/// interacted with in any part. Per-user draws use child seeds of
/// (seed, part, user) so results are independent of iteration order.
EvalCandidates build_eval_candidates(const DatasetSplit& split,
                                     const std::vector<std::string>& catalog,
                                     std::size_t n, std::uint64_t seed);

/// Fixed pseudo-negative training set: ratio_per_positive label-0
/// interactions per training positive, drawn from items the user never
/// interacted with and that are not among the user's evaluation negatives.
std::vector<Interaction> sample_training_negatives(
    const DatasetSplit& split, const EvalCandidates& eval_candidates,
    const std::vector<std::string>& catalog, std::size_t ratio_per_positive,
    std::uint64_t seed);

struct SplitManifest {
  std::uint64_t seed = 0;
  std::array<double, 3> ratio{0.8, 0.1, 0.1};
  std::array<std::size_t, 3> counts{0, 0, 0};
  std::string checksum;  // digest over the sorted (user, item, part) triples
};

SplitManifest make_split_manifest(const DatasetSplit& split);
void save_split_manifest(const std::string& path, const SplitManifest& manifest,
                         const std::string& config_digest);

}  // namespace textrec
