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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "textrec/types.hpp"

namespace textrec {

/// Undirected user-item bipartite graph. Node ids are dense: users occupy
/// [0, num_users()), items [num_users(), num_nodes()). Items with no
/// interactions may be included via extra_items and stay isolated.
class BipartiteGraph {
 public:
  static BipartiteGraph build(const std::vector<Interaction>& interactions,
                              const std::vector<std::string>& extra_items = {});

  std::size_t num_users() const { return user_ids_.size(); }
  std::size_t num_items() const { return item_ids_.size(); }
  std::size_t num_nodes() const { return user_ids_.size() + item_ids_.size(); }
  std::size_t num_edges() const { return num_edges_; }

  bool is_item_node(std::size_t node) const { return node >= user_ids_.size(); }
  const std::string& item_id_of(std::size_t node) const {
    return item_ids_[node - user_ids_.size()];
  }
  const std::string& user_id_of(std::size_t node) const {
    return user_ids_[node];
  }
  std::optional<std::size_t> item_node(const std::string& item_id) const;
  std::optional<std::size_t> user_node(const std::string& user_id) const;

  const std::vector<std::size_t>& neighbors_of(std::size_t node) const {
    return adjacency_[node];
  }
  std::size_t degree(std::size_t node) const { return adjacency_[node].size(); }

 private:
  std::vector<std::string> user_ids_;  // sorted
  std::vector<std::string> item_ids_;  // sorted
  std::vector<std::vector<std::size_t>> adjacency_;
  std::size_t num_edges_ = 0;
};

/// Random-walk-with-restart distribution from a source node.
struct PprVector {
  std::size_t source = 0;
  std::vector<double> scores;  // indexed by node id, sums to 1
  double alpha = 0.15;
  std::size_t iterations = 0;
  double residual = 0.0;
  bool isolated_source = false;  // point mass fallback, walk never left source
};

inline constexpr double kDefaultPprAlpha = 0.15;
inline constexpr double kDefaultPprTol = 1e-6;
inline constexpr std::size_t kDefaultPprMaxIter = 1000;

/// Power iteration x <- alpha * e_s + (1 - alpha) * W^T x with W the
/// row-normalized adjacency, until the max-norm change drops below tol or
/// max_iter is reached. An isolated source yields a flagged point mass.
PprVector compute_ppr(const BipartiteGraph& graph, std::size_t source,
                      double alpha = kDefaultPprAlpha,
                      double tol = kDefaultPprTol,
                      std::size_t max_iter = kDefaultPprMaxIter);

struct ScoredNeighbor {
  std::string item_id;
  double score = 0.0;
};

/// Up to T item neighbors of a target item, ordered by descending score
/// with ascending-id tie break. The target itself is never included.
struct NeighborSet {
  std::string target_item;
  std::vector<ScoredNeighbor> neighbors;
  std::size_t limit = 3;  // requested T
};

inline constexpr std::size_t kDefaultNeighborCount = 3;

/// Restricts the PPR scores to item nodes other than the source and keeps
/// the top T. If genre_filter is set, only items whose genres (looked up in
/// item_genres) intersect it survive.
NeighborSet top_neighbors(
    const BipartiteGraph& graph, const PprVector& ppr, std::size_t T,
    const std::optional<std::set<std::string>>& genre_filter = std::nullopt,
    const std::map<std::string, std::set<std::string>>* item_genres = nullptr);

struct NeighborParams {
  std::size_t T = kDefaultNeighborCount;
  double alpha = kDefaultPprAlpha;
  double tol = kDefaultPprTol;
  std::size_t max_iter = kDefaultPprMaxIter;
  bool genre_filter = false;  // restrict neighbors to the target's genres
};

/// One neighbor set per catalog item (isolated items get an empty list).
std::vector<NeighborSet> build_neighbor_sets(const BipartiteGraph& graph,
                                             const std::vector<ItemRecord>& items,
                                             const NeighborParams& params);

void save_neighbor_sets(const std::string& path,
                        const std::vector<NeighborSet>& sets,
                        std::uint64_t split_seed, double alpha);
std::vector<NeighborSet> load_neighbor_sets(const std::string& path);

}  // namespace textrec
