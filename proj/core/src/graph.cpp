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

#include "textrec/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "textrec/errors.hpp"

namespace textrec {

BipartiteGraph BipartiteGraph::build(
    const std::vector<Interaction>& interactions,
    const std::vector<std::string>& extra_items) {
  BipartiteGraph g;
  for (const auto& x : interactions) {
    g.user_ids_.push_back(x.user_id);
    g.item_ids_.push_back(x.item_id);
  }
  for (const auto& id : extra_items) g.item_ids_.push_back(id);
  std::sort(g.user_ids_.begin(), g.user_ids_.end());
  g.user_ids_.erase(std::unique(g.user_ids_.begin(), g.user_ids_.end()),
                    g.user_ids_.end());
  std::sort(g.item_ids_.begin(), g.item_ids_.end());
  g.item_ids_.erase(std::unique(g.item_ids_.begin(), g.item_ids_.end()),
                    g.item_ids_.end());

  g.adjacency_.assign(g.num_nodes(), {});
  for (const auto& x : interactions) {
    const std::size_t u = *g.user_node(x.user_id);
    const std::size_t i = *g.item_node(x.item_id);
    g.adjacency_[u].push_back(i);
    g.adjacency_[i].push_back(u);
  }
  // Duplicate interaction rows collapse into one edge.
  for (auto& adj : g.adjacency_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  for (std::size_t u = 0; u < g.num_users(); ++u) {
    g.num_edges_ += g.adjacency_[u].size();
  }
  return g;
}

std::optional<std::size_t> BipartiteGraph::item_node(
    const std::string& item_id) const {
  auto it = std::lower_bound(item_ids_.begin(), item_ids_.end(), item_id);
  if (it == item_ids_.end() || *it != item_id) return std::nullopt;
  return user_ids_.size() +
         static_cast<std::size_t>(std::distance(item_ids_.begin(), it));
}

std::optional<std::size_t> BipartiteGraph::user_node(
    const std::string& user_id) const {
  auto it = std::lower_bound(user_ids_.begin(), user_ids_.end(), user_id);
  if (it == user_ids_.end() || *it != user_id) return std::nullopt;
  return static_cast<std::size_t>(std::distance(user_ids_.begin(), it));
}

PprVector compute_ppr(const BipartiteGraph& graph, std::size_t source,
                      double alpha, double tol, std::size_t max_iter) {
  if (source >= graph.num_nodes()) throw Error("ppr source out of range");
  if (alpha <= 0.0 || alpha >= 1.0) throw ConfigError("ppr alpha must be in (0,1)");
  if (tol <= 0.0) throw ConfigError("ppr tol must be positive");

  PprVector out;
  out.source = source;
  out.alpha = alpha;
  out.scores.assign(graph.num_nodes(), 0.0);
  out.scores[source] = 1.0;
  if (graph.degree(source) == 0) {
    out.isolated_source = true;
    return out;
  }

  std::vector<double> next(graph.num_nodes(), 0.0);
  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    next[source] = alpha;
    for (std::size_t v = 0; v < graph.num_nodes(); ++v) {
      const double mass = out.scores[v];
      if (mass == 0.0) continue;
      const auto& adj = graph.neighbors_of(v);
      const double share = (1.0 - alpha) * mass / static_cast<double>(adj.size());
      for (std::size_t w : adj) next[w] += share;
    }
    double delta = 0.0;
    for (std::size_t v = 0; v < graph.num_nodes(); ++v) {
      delta = std::max(delta, std::abs(next[v] - out.scores[v]));
    }
    out.scores.swap(next);
    out.iterations = iter;
    out.residual = delta;
    if (delta < tol) break;
  }
  return out;
}

NeighborSet top_neighbors(
    const BipartiteGraph& graph, const PprVector& ppr, std::size_t T,
    const std::optional<std::set<std::string>>& genre_filter,
    const std::map<std::string, std::set<std::string>>* item_genres) {
  if (!graph.is_item_node(ppr.source)) {
    throw Error("neighbor selection requires an item source node");
  }
  NeighborSet out;
  out.target_item = graph.item_id_of(ppr.source);
  out.limit = T;

  std::vector<ScoredNeighbor> candidates;
  for (std::size_t node = graph.num_users(); node < graph.num_nodes(); ++node) {
    if (node == ppr.source) continue;
    const double score = ppr.scores[node];
    if (score <= 0.0) continue;
    const std::string& id = graph.item_id_of(node);
    if (genre_filter) {
      if (item_genres == nullptr) continue;
      auto it = item_genres->find(id);
      if (it == item_genres->end()) continue;
      bool shares = false;
      for (const auto& g : it->second) {
        if (genre_filter->count(g)) {
          shares = true;
          break;
        }
      }
      if (!shares) continue;
    }
    candidates.push_back(ScoredNeighbor{id, score});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const ScoredNeighbor& a, const ScoredNeighbor& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.item_id < b.item_id;
            });
  if (candidates.size() > T) candidates.resize(T);
  out.neighbors = std::move(candidates);
  return out;
}

std::vector<NeighborSet> build_neighbor_sets(const BipartiteGraph& graph,
                                             const std::vector<ItemRecord>& items,
                                             const NeighborParams& params) {
  std::map<std::string, std::set<std::string>> genres;
  if (params.genre_filter) {
    for (const auto& item : items) {
      auto g = item.genres();
      if (!g.empty()) genres[item.item_id].insert(g.begin(), g.end());
    }
  }
  std::vector<NeighborSet> out;
  out.reserve(items.size());
  for (const auto& item : items) {
    auto node = graph.item_node(item.item_id);
    if (!node) {
      out.push_back(NeighborSet{item.item_id, {}, params.T});
      continue;
    }
    const auto ppr =
        compute_ppr(graph, *node, params.alpha, params.tol, params.max_iter);
    if (ppr.isolated_source) {
      out.push_back(NeighborSet{item.item_id, {}, params.T});
      continue;
    }
    std::optional<std::set<std::string>> filter;
    if (params.genre_filter) {
      auto it = genres.find(item.item_id);
      if (it != genres.end()) filter = it->second;
    }
    out.push_back(top_neighbors(graph, ppr, params.T, filter,
                                params.genre_filter ? &genres : nullptr));
  }
  return out;
}

void save_neighbor_sets(const std::string& path,
                        const std::vector<NeighborSet>& sets,
                        std::uint64_t split_seed, double alpha) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write neighbor cache: " + path);
  for (const auto& s : sets) {
    nlohmann::json row;
    row["item_id"] = s.target_item;
    row["split_seed"] = split_seed;
    row["T"] = s.limit;
    row["alpha"] = alpha;
    auto arr = nlohmann::json::array();
    for (const auto& n : s.neighbors) {
      arr.push_back({{"item_id", n.item_id}, {"score", n.score}});
    }
    row["neighbors"] = arr;
    out << row.dump() << "\n";
  }
}

std::vector<NeighborSet> load_neighbor_sets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open neighbor cache: " + path);
  std::vector<NeighborSet> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json row = nlohmann::json::parse(line, nullptr, false);
    if (row.is_discarded()) throw ParseError("malformed neighbor row", line_no);
    NeighborSet s;
    s.target_item = row.at("item_id").get<std::string>();
    s.limit = row.at("T").get<std::size_t>();
    for (const auto& n : row.at("neighbors")) {
      s.neighbors.push_back(ScoredNeighbor{n.at("item_id").get<std::string>(),
                                           n.at("score").get<double>()});
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace textrec
