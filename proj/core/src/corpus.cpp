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

#include "textrec/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "textrec/digest.hpp"
#include "textrec/errors.hpp"
#include "textrec/rng.hpp"

namespace textrec {

namespace {

std::string json_value_to_string(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Minimal RFC-4180 row reader: quoted fields, "" escapes, no embedded
// newlines (item descriptions in CSV exports replace them upstream).
std::vector<std::string> split_csv_row(const std::string& line,
                                       std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      if (!cur.empty()) throw ParseError("unexpected quote in field", line_no);
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", line_no);
  fields.push_back(std::move(cur));
  return fields;
}

std::vector<ItemRecord> load_items_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open item file: " + path);
  std::vector<ItemRecord> items;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json row = nlohmann::json::parse(line, nullptr, false);
    if (row.is_discarded() || !row.is_object()) {
      throw ParseError("malformed JSON object", line_no);
    }
    if (!row.contains("item_id") || !row.contains("description")) {
      throw ParseError("missing item_id or description", line_no);
    }
    ItemRecord rec;
    rec.item_id = json_value_to_string(row["item_id"]);
    rec.description = json_value_to_string(row["description"]);
    for (auto it = row.begin(); it != row.end(); ++it) {
      if (it.key() == "item_id" || it.key() == "description") continue;
      rec.metadata[it.key()] = json_value_to_string(it.value());
    }
    if (!seen.insert(rec.item_id).second) {
      throw DuplicateIdError("duplicate item_id: " + rec.item_id);
    }
    items.push_back(std::move(rec));
  }
  return items;
}

std::vector<ItemRecord> load_items_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open item file: " + path);
  std::string line;
  if (!std::getline(in, line)) return {};
  const auto header = split_csv_row(line, 1);
  std::size_t id_col = header.size(), desc_col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "item_id") id_col = i;
    if (header[i] == "description") desc_col = i;
  }
  if (id_col == header.size() || desc_col == header.size()) {
    throw ParseError("header must contain item_id and description columns", 1);
  }
  std::vector<ItemRecord> items;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_row(line, line_no);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) +
                           " fields, got " + std::to_string(fields.size()),
                       line_no);
    }
    ItemRecord rec;
    rec.item_id = fields[id_col];
    rec.description = fields[desc_col];
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i == id_col || i == desc_col) continue;
      rec.metadata[header[i]] = fields[i];
    }
    if (!seen.insert(rec.item_id).second) {
      throw DuplicateIdError("duplicate item_id: " + rec.item_id);
    }
    items.push_back(std::move(rec));
  }
  return items;
}

}  // namespace

std::vector<std::string> ItemRecord::genres() const {
  std::vector<std::string> out;
  auto it = metadata.find("genres");
  if (it == metadata.end()) return out;
  std::stringstream ss(it->second);
  std::string g;
  while (std::getline(ss, g, '|')) {
    if (!g.empty()) out.push_back(g);
  }
  return out;
}

std::vector<ItemRecord> load_items(const std::string& path,
                                   ItemFileFormat format) {
  return format == ItemFileFormat::jsonl ? load_items_jsonl(path)
                                         : load_items_csv(path);
}

void save_items_jsonl(const std::string& path,
                      const std::vector<ItemRecord>& items) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write item file: " + path);
  for (const auto& item : items) {
    nlohmann::json row;
    row["item_id"] = item.item_id;
    row["description"] = item.description;
    for (const auto& [k, v] : item.metadata) row[k] = v;
    out << row.dump() << "\n";
  }
}

std::vector<RatingRecord> load_interactions_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open interaction file: " + path);
  std::string line;
  if (!std::getline(in, line)) return {};
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) header.push_back(col);
  }
  std::size_t user_col = header.size(), item_col = header.size();
  std::size_t rating_col = header.size(), ts_col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "user_id") user_col = i;
    if (header[i] == "item_id") item_col = i;
    if (header[i] == "rating") rating_col = i;
    if (header[i] == "timestamp") ts_col = i;
  }
  if (user_col == header.size() || item_col == header.size()) {
    throw ParseError("header must contain user_id and item_id columns", 1);
  }
  std::vector<RatingRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, '\t')) fields.push_back(f);
    if (fields.size() < 2 || fields.size() > header.size()) {
      throw ParseError("malformed interaction row", line_no);
    }
    RatingRecord rec;
    rec.user_id = fields[user_col];
    rec.item_id = fields[item_col];
    try {
      if (rating_col < fields.size() && !fields[rating_col].empty()) {
        rec.rating = std::stod(fields[rating_col]);
      }
      if (ts_col < fields.size() && !fields[ts_col].empty()) {
        rec.timestamp = std::stoll(fields[ts_col]);
      }
    } catch (const std::exception&) {
      throw ParseError("non-numeric rating or timestamp", line_no);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

void save_interactions_tsv(const std::string& path,
                           const std::vector<Interaction>& interactions) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write interaction file: " + path);
  out << "user_id\titem_id\trating\ttimestamp\n";
  for (const auto& x : interactions) {
    out << x.user_id << '\t' << x.item_id << '\t' << x.label << '\t'
        << x.timestamp << '\n';
  }
}

std::vector<Interaction> to_implicit(const std::vector<RatingRecord>& ratings) {
  std::map<std::pair<std::string, std::string>, std::int64_t> pairs;
  for (const auto& r : ratings) {
    auto key = std::make_pair(r.user_id, r.item_id);
    auto it = pairs.find(key);
    if (it == pairs.end()) {
      pairs.emplace(std::move(key), r.timestamp);
    } else if (r.timestamp >= 0 &&
               (it->second < 0 || r.timestamp < it->second)) {
      it->second = r.timestamp;
    }
  }
  std::vector<Interaction> out;
  out.reserve(pairs.size());
  for (const auto& [key, ts] : pairs) {
    out.push_back(Interaction{key.first, key.second, 1, ts});
  }
  return out;
}

std::vector<Interaction> filter_by_activity(std::vector<Interaction> interactions,
                                            std::size_t min_user,
                                            std::size_t min_item) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::unordered_map<std::string, std::size_t> user_count, item_count;
    for (const auto& x : interactions) {
      ++user_count[x.user_id];
      ++item_count[x.item_id];
    }
    std::vector<Interaction> kept;
    kept.reserve(interactions.size());
    for (auto& x : interactions) {
      if (user_count[x.user_id] >= min_user && item_count[x.item_id] >= min_item) {
        kept.push_back(std::move(x));
      }
    }
    if (kept.size() != interactions.size()) changed = true;
    interactions = std::move(kept);
  }
  return interactions;
}

DatasetSplit split_dataset(const std::vector<Interaction>& positives,
                           std::array<double, 3> ratio, std::uint64_t seed) {
  double sum = ratio[0] + ratio[1] + ratio[2];
  if (std::abs(sum - 1.0) > 1e-9 || ratio[0] <= 0 || ratio[1] <= 0 ||
      ratio[2] <= 0) {
    throw ConfigError("split ratio components must be positive and sum to 1");
  }
  // Canonical ordering first so the partition depends only on the set of
  // interactions, not on file order.
  std::vector<Interaction> pool = positives;
  std::sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
    return std::tie(a.user_id, a.item_id) < std::tie(b.user_id, b.item_id);
  });
  Rng rng(child_seed(seed, "split"));
  rng.shuffle(pool);

  const std::size_t n = pool.size();
  const auto n_train = static_cast<std::size_t>(std::llround(ratio[0] * n));
  const auto n_val = static_cast<std::size_t>(std::llround(ratio[1] * n));
  if (n_train == 0 || n_val == 0 || n_train + n_val >= n) {
    throw InsufficientDataError(
        "dataset too small for ratio: " + std::to_string(n) + " positives");
  }
  DatasetSplit split;
  split.seed = seed;
  split.ratio = ratio;
  split.train.assign(pool.begin(), pool.begin() + n_train);
  split.validation.assign(pool.begin() + n_train, pool.begin() + n_train + n_val);
  split.test.assign(pool.begin() + n_train + n_val, pool.end());
  return split;
}

namespace {

using UserItems = std::map<std::string, std::set<std::string>>;

UserItems observed_by_user(const DatasetSplit& split) {
  UserItems observed;
  for (const auto* part : {&split.train, &split.validation, &split.test}) {
    for (const auto& x : *part) observed[x.user_id].insert(x.item_id);
  }
  return observed;
}

}  // namespace

EvalCandidates build_eval_candidates(const DatasetSplit& split,
                                     const std::vector<std::string>& catalog,
                                     std::size_t n, std::uint64_t seed) {
  std::vector<std::string> sorted_catalog = catalog;
  std::sort(sorted_catalog.begin(), sorted_catalog.end());
  sorted_catalog.erase(
      std::unique(sorted_catalog.begin(), sorted_catalog.end()),
      sorted_catalog.end());
  const auto observed = observed_by_user(split);

  UserItems val_positives, test_positives;
  for (const auto& x : split.validation) {
    val_positives[x.user_id].insert(x.item_id);
  }
  for (const auto& x : split.test) test_positives[x.user_id].insert(x.item_id);

  // One negative pool per user, shared by the user's validation and test
  // candidate sets; drawing per part would shrink the legal training-
  // negative pool by the union of two draws.
  std::set<std::string> eval_users;
  for (const auto& [user, _] : val_positives) eval_users.insert(user);
  for (const auto& [user, _] : test_positives) eval_users.insert(user);

  std::map<std::string, std::vector<std::string>> negatives_by_user;
  for (const auto& user : eval_users) {
    const auto& seen = observed.at(user);
    std::vector<std::string> legal;
    legal.reserve(sorted_catalog.size());
    for (const auto& item : sorted_catalog) {
      if (!seen.count(item)) legal.push_back(item);
    }
    if (legal.size() < n) {
      throw NotEnoughItemsError("user " + user + " has only " +
                                std::to_string(legal.size()) +
                                " unobserved items, need " + std::to_string(n));
    }
    Rng rng(child_seed(seed, "eval-neg/" + user));
    std::vector<std::string> negatives;
    for (std::size_t idx : rng.sample_without_replacement(legal.size(), n)) {
      negatives.push_back(legal[idx]);
    }
    negatives_by_user[user] = std::move(negatives);
  }

  EvalCandidates out;
  for (const auto& [user, positives] : val_positives) {
    out.validation.push_back(
        EvalCandidateSet{user,
                         {positives.begin(), positives.end()},
                         negatives_by_user.at(user)});
  }
  for (const auto& [user, positives] : test_positives) {
    out.test.push_back(
        EvalCandidateSet{user,
                         {positives.begin(), positives.end()},
                         negatives_by_user.at(user)});
  }
  return out;
}

std::vector<Interaction> sample_training_negatives(
    const DatasetSplit& split, const EvalCandidates& eval_candidates,
    const std::vector<std::string>& catalog, std::size_t ratio_per_positive,
    std::uint64_t seed) {
  if (ratio_per_positive < 1) {
    throw ConfigError("ratio_per_positive must be >= 1");
  }
  std::vector<std::string> sorted_catalog = catalog;
  std::sort(sorted_catalog.begin(), sorted_catalog.end());
  sorted_catalog.erase(
      std::unique(sorted_catalog.begin(), sorted_catalog.end()),
      sorted_catalog.end());

  const auto observed = observed_by_user(split);
  UserItems excluded;  // eval negatives per user, both parts
  for (const auto* part : {&eval_candidates.validation, &eval_candidates.test}) {
    for (const auto& cs : *part) {
      excluded[cs.user_id].insert(cs.negatives.begin(), cs.negatives.end());
    }
  }
  std::map<std::string, std::size_t> train_positives;
  for (const auto& x : split.train) ++train_positives[x.user_id];

  std::vector<Interaction> negatives;
  for (const auto& [user, count] : train_positives) {
    const auto& seen = observed.at(user);
    const auto* excl = excluded.count(user) ? &excluded.at(user) : nullptr;
    std::vector<std::string> legal;
    legal.reserve(sorted_catalog.size());
    for (const auto& item : sorted_catalog) {
      if (seen.count(item)) continue;
      if (excl && excl->count(item)) continue;
      legal.push_back(item);
    }
    const std::size_t need = count * ratio_per_positive;
    if (legal.size() < need) {
      throw NotEnoughItemsError("user " + user + " has only " +
                                std::to_string(legal.size()) +
                                " legal negatives, need " +
                                std::to_string(need));
    }
    Rng rng(child_seed(seed, "train-neg/" + user));
    for (std::size_t idx : rng.sample_without_replacement(legal.size(), need)) {
      negatives.push_back(Interaction{user, legal[idx], 0, -1});
    }
  }
  return negatives;
}

SplitManifest make_split_manifest(const DatasetSplit& split) {
  SplitManifest m;
  m.seed = split.seed;
  m.ratio = split.ratio;
  m.counts = {split.train.size(), split.validation.size(), split.test.size()};
  std::vector<std::string> rows;
  const char* tags[3] = {"train", "validation", "test"};
  const std::vector<Interaction>* parts[3] = {&split.train, &split.validation,
                                              &split.test};
  for (int p = 0; p < 3; ++p) {
    for (const auto& x : *parts[p]) {
      rows.push_back(x.user_id + "\t" + x.item_id + "\t" + tags[p]);
    }
  }
  std::sort(rows.begin(), rows.end());
  std::string blob;
  for (const auto& r : rows) {
    blob += r;
    blob += '\n';
  }
  m.checksum = content_digest(blob);
  return m;
}

void save_split_manifest(const std::string& path, const SplitManifest& manifest,
                         const std::string& config_digest) {
  nlohmann::json j;
  j["seed"] = manifest.seed;
  j["ratio"] = manifest.ratio;
  j["counts"] = {{"train", manifest.counts[0]},
                 {"validation", manifest.counts[1]},
                 {"test", manifest.counts[2]}};
  j["checksum"] = manifest.checksum;
  j["config_digest"] = config_digest;
  std::ofstream out(path);
  if (!out) throw Error("cannot write split manifest: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace textrec
