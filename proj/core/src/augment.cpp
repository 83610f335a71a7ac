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

#include "textrec/augment.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "textrec/digest.hpp"
#include "textrec/errors.hpp"
#include "textrec/rng.hpp"

namespace textrec {

namespace {

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string hex8(std::uint64_t h) {
  char buf[9];
  std::snprintf(buf, sizeof(buf), "%08x",
                static_cast<unsigned>(h & 0xffffffffu));
  return buf;
}

constexpr const char* kBootstrapPrefix = "Summarize the movie ";

}  // namespace

std::string params_digest(const CompletionParams& params) {
  std::ostringstream ss;
  ss.precision(17);
  ss << params.temperature << '|' << params.max_tokens << '|' << params.top_p
     << '|' << params.frequency_penalty << '|' << params.presence_penalty
     << '|' << params.model_tag;
  return content_digest(ss.str());
}

std::string complete_with_retry(CompletionProvider& provider,
                                const RenderedPrompt& prompt,
                                const CompletionParams& params,
                                const RetryPolicy& policy) {
  std::size_t attempt = 0;
  std::size_t delay = policy.base_delay_ms;
  for (;;) {
    try {
      return provider.complete(prompt, params);
    } catch (const ProviderError& e) {
      if (!e.transient() || attempt >= policy.max_retries) throw;
      ++attempt;
      if (policy.sleeper) {
        policy.sleeper(delay);
      } else {
        std::this_thread::sleep_for(std::chrono::milliseconds(delay));
      }
      delay = std::min(delay * 2, policy.max_delay_ms);
    }
  }
}

std::vector<std::string> SignalLexicon::all_tokens() const {
  std::vector<std::string> out;
  for (const auto& [_, tokens] : tokens_by_key) {
    out.insert(out.end(), tokens.begin(), tokens.end());
  }
  return out;
}

MockProvider::MockProvider(std::uint64_t seed, SignalLexicon lexicon,
                           std::map<std::string, ItemRecord> item_table)
    : seed_(seed), lexicon_(std::move(lexicon)), items_(std::move(item_table)) {}

std::string MockProvider::complete(const RenderedPrompt& prompt,
                                   const CompletionParams& /*params*/) {
  ++calls_;
  const std::uint64_t h = splitmix64(fnv1a64(prompt.text) ^ seed_);

  if (prompt.text.rfind(kBootstrapPrefix, 0) == 0) {
    // Title expansion: echo the title back as a one-line description.
    const std::size_t start = std::string(kBootstrapPrefix).size();
    const std::size_t end = prompt.text.find(" with one sentence.");
    const std::string title = end == std::string::npos
                                  ? prompt.text.substr(start)
                                  : prompt.text.substr(start, end - start);
    return "A story about " + title + " boot" + hex8(h) + ".";
  }

  std::string description;
  auto it = items_.find(prompt.item_id);
  if (it != items_.end()) {
    description = it->second.description;
  } else {
    // Fall back to the first quoted span, which every canonical template
    // fills with the item description.
    const auto open = prompt.text.find('\'');
    const auto close =
        open == std::string::npos ? open : prompt.text.find('\'', open + 1);
    if (close != std::string::npos) {
      description = prompt.text.substr(open + 1, close - open - 1);
    }
  }

  std::string response = description;
  response += " aug" + to_string(prompt.strategy) + hex8(h);

  const Family family = family_of(prompt.strategy);
  if ((family == Family::rec || family == Family::rec_eng) && it != items_.end()) {
    for (const auto& genre : it->second.genres()) {
      auto lex = lexicon_.tokens_by_key.find(genre);
      if (lex == lexicon_.tokens_by_key.end()) continue;
      for (const auto& token : lex->second) {
        response += " " + token;
      }
    }
  }
  return response;
}

std::string AugmentationCache::key_of(const std::string& item_id,
                                      const std::string& strategy,
                                      const std::string& variant_tag,
                                      const std::string& model_tag,
                                      const std::string& params_hash) {
  return item_id + "\x1f" + strategy + "\x1f" + variant_tag + "\x1f" +
         model_tag + "\x1f" + params_hash;
}

AugmentationCache::AugmentationCache(const std::string& path) : path_(path) {
  std::ifstream in(path_);
  if (!in) return;  // fresh cache
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError("malformed cache record", line_no);
    AugmentationRecord rec;
    rec.item_id = j.at("item_id").get<std::string>();
    rec.strategy = j.at("strategy").get<std::string>();
    rec.variant_tag = j.value("variant_tag", "");
    rec.prompt_hash = j.value("prompt_hash", "");
    rec.response = j.at("response").get<std::string>();
    rec.model_tag = j.at("model_tag").get<std::string>();
    rec.params_hash = j.at("params_hash").get<std::string>();
    rec.created_at = j.value("created_at", "");
    const auto key = key_of(rec.item_id, rec.strategy, rec.variant_tag,
                            rec.model_tag, rec.params_hash);
    index_[key] = records_.size();
    records_.push_back(std::move(rec));
  }
}

const AugmentationRecord* AugmentationCache::find(
    const std::string& item_id, const std::string& strategy,
    const std::string& variant_tag, const std::string& model_tag,
    const std::string& params_hash) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it =
      index_.find(key_of(item_id, strategy, variant_tag, model_tag, params_hash));
  if (it == index_.end()) return nullptr;
  return &records_[it->second];
}

void AugmentationCache::put(const AugmentationRecord& record) {
  std::lock_guard<std::mutex> lock(mutex_);
  const auto key = key_of(record.item_id, record.strategy, record.variant_tag,
                          record.model_tag, record.params_hash);
  auto it = index_.find(key);
  if (it != index_.end()) {
    records_[it->second] = record;
    return;
  }
  index_[key] = records_.size();
  records_.push_back(record);
  if (path_.empty()) return;
  nlohmann::json j;
  j["item_id"] = record.item_id;
  j["strategy"] = record.strategy;
  j["variant_tag"] = record.variant_tag;
  j["prompt_hash"] = record.prompt_hash;
  j["response"] = record.response;
  j["model_tag"] = record.model_tag;
  j["params_hash"] = record.params_hash;
  j["created_at"] = record.created_at;
  std::ofstream out(path_, std::ios::app);
  if (!out) throw Error("cannot append to cache: " + path_);
  out << j.dump() << "\n";
}

namespace {

struct AugmentTask {
  std::size_t item_index;
  Strategy strategy;
};

}  // namespace

AugmentReport augment_corpus(const std::vector<ItemRecord>& items,
                             const std::vector<NeighborSet>& neighbor_sets,
                             CompletionProvider& provider,
                             const CompletionParams& params,
                             const PromptRegistry& registry,
                             AugmentationCache& cache,
                             const AugmentOptions& options) {
  const std::string phash = params_digest(params);
  AugmentReport report;

  std::map<std::string, const NeighborSet*> neighbors_by_item;
  for (const auto& s : neighbor_sets) neighbors_by_item[s.target_item] = &s;

  bool wants_eng = false;
  for (Strategy s : options.strategies) wants_eng |= needs_neighbors(s);
  if (wants_eng && neighbor_sets.empty() && !items.empty()) {
    throw ConfigError(
        "engagement strategies requested but no neighbor cache provided");
  }

  // Effective descriptions: bootstrap items that ship only a title.
  std::vector<ItemRecord> effective = items;
  std::mutex report_mutex;
  for (auto& item : effective) {
    if (!item.description.empty() || !options.bootstrap_missing_descriptions) {
      continue;
    }
    auto title = item.metadata.find("title");
    if (title == item.metadata.end() || title->second.empty()) continue;
    ++report.requested;
    if (const auto* hit =
            cache.find(item.item_id, "bootstrap", "", params.model_tag, phash)) {
      item.description = hit->response;
      ++report.cached_hits;
      continue;
    }
    RenderedPrompt prompt;
    prompt.item_id = item.item_id;
    prompt.text = render_bootstrap_description(title->second);
    try {
      AugmentationRecord rec;
      rec.item_id = item.item_id;
      rec.strategy = "bootstrap";
      rec.model_tag = params.model_tag;
      rec.params_hash = phash;
      rec.prompt_hash = content_digest(prompt.text);
      rec.response = complete_with_retry(provider, prompt, params, options.retry);
      rec.created_at = now_iso8601();
      cache.put(rec);
      item.description = rec.response;
      ++report.generated;
    } catch (const ProviderError& e) {
      ++report.failed;
      report.failures.push_back(item.item_id + "/bootstrap: " + e.what());
      if (!e.transient()) report.fatal = true;
    }
  }

  std::map<std::string, const ItemRecord*> by_id;
  for (const auto& item : effective) by_id[item.item_id] = &item;

  std::vector<AugmentTask> tasks;
  for (std::size_t i = 0; i < effective.size(); ++i) {
    for (Strategy s : options.strategies) tasks.push_back({i, s});
  }
  report.requested += tasks.size();

  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t t = cursor.fetch_add(1);
      if (t >= tasks.size()) return;
      const auto& task = tasks[t];
      const ItemRecord& item = effective[task.item_index];
      const std::string sid = to_string(task.strategy);
      if (cache.find(item.item_id, sid, options.variant_tag, params.model_tag,
                     phash)) {
        std::lock_guard<std::mutex> lock(report_mutex);
        ++report.cached_hits;
        continue;
      }
      try {
        NeighborDescriptions descs;
        const NeighborDescriptions* descs_ptr = nullptr;
        if (needs_neighbors(task.strategy)) {
          auto ns = neighbors_by_item.find(item.item_id);
          if (ns != neighbors_by_item.end()) {
            for (const auto& n : ns->second->neighbors) {
              auto other = by_id.find(n.item_id);
              if (other != by_id.end()) {
                descs.emplace_back(n.item_id, other->second->description);
              }
            }
          }
          descs_ptr = &descs;
        }
        const RenderedPrompt prompt = render_prompt(
            registry, task.strategy, item, descs_ptr, options.variant_tag);
        AugmentationRecord rec;
        rec.item_id = item.item_id;
        rec.strategy = sid;
        rec.variant_tag = options.variant_tag;
        rec.prompt_hash = content_digest(prompt.text);
        rec.model_tag = params.model_tag;
        rec.params_hash = phash;
        rec.response =
            complete_with_retry(provider, prompt, params, options.retry);
        rec.created_at = now_iso8601();
        cache.put(rec);
        std::lock_guard<std::mutex> lock(report_mutex);
        ++report.generated;
      } catch (const ProviderError& e) {
        std::lock_guard<std::mutex> lock(report_mutex);
        ++report.failed;
        report.failures.push_back(item.item_id + "/" + sid + ": " + e.what());
        if (!e.transient()) report.fatal = true;
      } catch (const Error& e) {
        std::lock_guard<std::mutex> lock(report_mutex);
        ++report.failed;
        report.failures.push_back(item.item_id + "/" + sid + ": " + e.what());
        report.fatal = true;
      }
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return report;
}

}  // namespace textrec
