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

#include <atomic>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "textrec/graph.hpp"
#include "textrec/prompts.hpp"
#include "textrec/types.hpp"

namespace textrec {

struct CompletionParams {
  double temperature = 0.0;
  std::size_t max_tokens = 512;
  double top_p = 1.0;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.6;
  std::string model_tag = "mock";
};

/// Stable digest over every generation-relevant parameter.
std::string params_digest(const CompletionParams& params);

struct AugmentationRecord {
  std::string item_id;
  std::string strategy;  // strategy id, or "bootstrap" for title expansion
  std::string variant_tag;
  std::string prompt_hash;
  std::string response;  // may be empty: weak models do return nothing
  std::string model_tag;
  std::string params_hash;
  std::string created_at;  // ISO-8601 UTC
};

class CompletionProvider {
 public:
  virtual ~CompletionProvider() = default;
  virtual std::string complete(const RenderedPrompt& prompt,
                               const CompletionParams& params) = 0;
  virtual std::string name() const = 0;
  std::size_t calls() const { return calls_.load(); }

 protected:
  std::atomic<std::size_t> calls_{0};
};

struct RetryPolicy {
  std::size_t max_retries = 5;
  std::size_t base_delay_ms = 100;
  std::size_t max_delay_ms = 5000;
  // Injectable for tests; defaults to sleeping.
  std::function<void(std::size_t ms)> sleeper;
};

/// Calls the provider, retrying transient failures (rate limits, timeouts)
/// with capped exponential backoff. Fatal errors propagate immediately.
std::string complete_with_retry(CompletionProvider& provider,
                                const RenderedPrompt& prompt,
                                const CompletionParams& params,
                                const RetryPolicy& policy = {});

/// Tokens planted into recommendation-driven responses, keyed by a metadata
/// value (typically a genre label). Lets synthetic experiments embed a
/// recoverable preference signal.
struct SignalLexicon {
  std::map<std::string, std::vector<std::string>> tokens_by_key;

  bool empty() const { return tokens_by_key.empty(); }
  /// All lexicon tokens in key order.
  std::vector<std::string> all_tokens() const;
};

/// Offline stand-in for a hosted model. The response is a pure function of
/// (prompt text, seed): the item description followed by a synthetic token
/// unique to the prompt, plus — for recommendation-driven prompts only —
/// the lexicon tokens of the item's genres.
class MockProvider : public CompletionProvider {
 public:
  MockProvider(std::uint64_t seed, SignalLexicon lexicon = {},
               std::map<std::string, ItemRecord> item_table = {});

  std::string complete(const RenderedPrompt& prompt,
                       const CompletionParams& params) override;
  std::string name() const override { return "mock"; }

 private:
  std::uint64_t seed_;
  SignalLexicon lexicon_;
  std::map<std::string, ItemRecord> items_;
};

/// Append-only JSONL response cache. A record is keyed by
/// (item_id, strategy, variant_tag, model_tag, params_hash); reruns with an
/// unchanged key are cache hits and never reach the provider.
class AugmentationCache {
 public:
  AugmentationCache() = default;
  /// Binds the cache to a file, loading existing records if present.
  explicit AugmentationCache(const std::string& path);

  /// Returned pointers stay valid across later put() calls.
  const AugmentationRecord* find(const std::string& item_id,
                                 const std::string& strategy,
                                 const std::string& variant_tag,
                                 const std::string& model_tag,
                                 const std::string& params_hash) const;
  void put(const AugmentationRecord& record);
  std::size_t size() const { return records_.size(); }
  const std::deque<AugmentationRecord>& records() const { return records_; }

 private:
  std::string path_;  // empty = in-memory only
  std::deque<AugmentationRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
  mutable std::mutex mutex_;

  static std::string key_of(const std::string& item_id,
                            const std::string& strategy,
                            const std::string& variant_tag,
                            const std::string& model_tag,
                            const std::string& params_hash);
};

struct AugmentReport {
  std::size_t requested = 0;
  std::size_t cached_hits = 0;
  std::size_t generated = 0;
  std::size_t failed = 0;
  std::vector<std::string> failures;  // "item_id/strategy: reason"
  bool fatal = false;
};

struct AugmentOptions {
  std::vector<Strategy> strategies{kAllStrategies.begin(), kAllStrategies.end()};
  std::string variant_tag;  // "" = canonical wording
  std::size_t jobs = 1;
  RetryPolicy retry;
  /// Generate descriptions for items that have none but carry a title.
  bool bootstrap_missing_descriptions = true;
};

/// Ensures every (item, strategy) pair has a cache record, calling the
/// provider only for misses. Failed pairs are reported, not thrown;
/// report.fatal is set if any failure was non-transient.
AugmentReport augment_corpus(const std::vector<ItemRecord>& items,
                             const std::vector<NeighborSet>& neighbor_sets,
                             CompletionProvider& provider,
                             const CompletionParams& params,
                             const PromptRegistry& registry,
                             AugmentationCache& cache,
                             const AugmentOptions& options = {});

}  // namespace textrec
