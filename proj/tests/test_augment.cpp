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

#include <doctest.h>

#include <filesystem>
#include <set>

#include "textrec/errors.hpp"
#include "textrec/text.hpp"

using namespace textrec;

namespace {

std::map<std::string, ItemRecord> two_item_table() {
  std::map<std::string, ItemRecord> items;
  items["m1"] = ItemRecord{
      "m1", "A stray cat adopts a night-shift radio host.",
      {{"genres", "Comedy"}}};
  items["m2"] = ItemRecord{
      "m2", "A mountain village bakes bread for a sleeping giant.",
      {{"genres", "Drama"}}};
  return items;
}

SignalLexicon comedy_lexicon() {
  SignalLexicon lex;
  lex.tokens_by_key["Comedy"] = {"funny", "lighthearted"};
  lex.tokens_by_key["Drama"] = {"somber"};
  return lex;
}

RenderedPrompt prompt_for(Strategy s, const ItemRecord& item,
                          const PromptRegistry& registry) {
  NeighborDescriptions none;
  const auto* n = needs_neighbors(s) ? &none : nullptr;
  return render_prompt(registry, s, item, n);
}

// Provider that fails a configurable number of times before succeeding.
class FlakyProvider : public CompletionProvider {
 public:
  FlakyProvider(std::size_t failures, bool fatal)
      : failures_(failures), fatal_(fatal) {}
  std::string complete(const RenderedPrompt&, const CompletionParams&) override {
    ++calls_;
    if (calls_ <= failures_) {
      if (fatal_) {
        throw ProviderError(ProviderError::Kind::fatal, "auth rejected");
      }
      throw RateLimitedError("slow down");
    }
    return "ok";
  }
  std::string name() const override { return "flaky"; }

 private:
  std::size_t failures_;
  bool fatal_;
};

}  // namespace

TEST_SUITE("augment") {

TEST_CASE("params digest covers every generation parameter") {
  CompletionParams params;
  const auto base = params_digest(params);
  CompletionParams changed = params;
  changed.presence_penalty = 0.7;
  CHECK(params_digest(changed) != base);
  changed = params;
  changed.model_tag = "other";
  CHECK(params_digest(changed) != base);
  CHECK(params_digest(params) == base);
}

TEST_CASE("mock provider is deterministic") {
  MockProvider provider(42, comedy_lexicon(), two_item_table());
  const auto registry = PromptRegistry::canonical();
  const auto prompt =
      prompt_for(Strategy::para, two_item_table().at("m1"), registry);
  CompletionParams params;
  const auto a = provider.complete(prompt, params);
  const auto b = provider.complete(prompt, params);
  CHECK(a == b);
  MockProvider other_seed(43, comedy_lexicon(), two_item_table());
  CHECK(other_seed.complete(prompt, params) != a);
}

TEST_CASE("mock provider plants lexicon tokens only in rec-family output") {
  MockProvider provider(42, comedy_lexicon(), two_item_table());
  const auto registry = PromptRegistry::canonical();
  const auto item = two_item_table().at("m1");
  CompletionParams params;

  const auto basic = provider.complete(
      prompt_for(Strategy::para, item, registry), params);
  const auto rec = provider.complete(
      prompt_for(Strategy::para_rec, item, registry), params);

  const auto basic_tokens = token_set(basic);
  const auto rec_tokens = token_set(rec);
  CHECK(rec_tokens.count("funny") == 1);
  CHECK(rec_tokens.count("lighthearted") == 1);
  CHECK(basic_tokens.count("funny") == 0);
  CHECK(basic_tokens.count("lighthearted") == 0);
  CHECK(rec_tokens.count("somber") == 0);  // wrong genre never planted

  SUBCASE("overlap is exactly the description tokens") {
    std::set<std::string> overlap;
    for (const auto& t : basic_tokens) {
      if (rec_tokens.count(t)) overlap.insert(t);
    }
    const auto desc_tokens = token_set(item.description);
    CHECK(overlap == std::set<std::string>(desc_tokens.begin(),
                                           desc_tokens.end()));
  }
}

TEST_CASE("mock provider answers bootstrap prompts with a description") {
  MockProvider provider(42, {}, {});
  RenderedPrompt prompt;
  prompt.item_id = "m9";
  prompt.text = render_bootstrap_description("Gladiator");
  const auto response = provider.complete(prompt, {});
  CHECK(response.find("Gladiator") != std::string::npos);
  CHECK_FALSE(response.empty());
}

TEST_CASE("retry policy retries transient failures only") {
  CompletionParams params;
  RenderedPrompt prompt;
  prompt.text = "x";
  RetryPolicy policy;
  policy.max_retries = 3;
  std::size_t naps = 0;
  policy.sleeper = [&naps](std::size_t) { ++naps; };

  SUBCASE("transient failures are retried with backoff") {
    FlakyProvider flaky(2, /*fatal=*/false);
    CHECK(complete_with_retry(flaky, prompt, params, policy) == "ok");
    CHECK(flaky.calls() == 3);
    CHECK(naps == 2);
  }
  SUBCASE("fatal failures are never retried") {
    FlakyProvider fatal(1, /*fatal=*/true);
    CHECK_THROWS_AS(complete_with_retry(fatal, prompt, params, policy),
                    ProviderError);
    CHECK(fatal.calls() == 1);
    CHECK(naps == 0);
  }
  SUBCASE("retries are capped") {
    FlakyProvider hopeless(100, /*fatal=*/false);
    CHECK_THROWS_AS(complete_with_retry(hopeless, prompt, params, policy),
                    RateLimitedError);
    CHECK(hopeless.calls() == 4);  // initial call + 3 retries
  }
}

TEST_CASE("cache keys cover item, strategy, variant, model and params") {
  AugmentationCache cache;
  AugmentationRecord rec;
  rec.item_id = "m1";
  rec.strategy = "para";
  rec.model_tag = "mock";
  rec.params_hash = "p1";
  rec.response = "r";
  cache.put(rec);
  CHECK(cache.find("m1", "para", "", "mock", "p1") != nullptr);
  CHECK(cache.find("m1", "para", "v1", "mock", "p1") == nullptr);
  CHECK(cache.find("m1", "tag", "", "mock", "p1") == nullptr);
  CHECK(cache.find("m1", "para", "", "other", "p1") == nullptr);
  CHECK(cache.find("m1", "para", "", "mock", "p2") == nullptr);
  CHECK(cache.find("m2", "para", "", "mock", "p1") == nullptr);
}

TEST_CASE("cache persists records across instances") {
  const auto path =
      (std::filesystem::temp_directory_path() / "aug_cache_rt.jsonl").string();
  std::filesystem::remove(path);
  {
    AugmentationCache cache(path);
    AugmentationRecord rec;
    rec.item_id = "m1";
    rec.strategy = "para";
    rec.model_tag = "mock";
    rec.params_hash = "p1";
    rec.response = "remembered";
    cache.put(rec);
  }
  AugmentationCache reloaded(path);
  const auto* hit = reloaded.find("m1", "para", "", "mock", "p1");
  REQUIRE(hit != nullptr);
  CHECK(hit->response == "remembered");
}

TEST_CASE("augment_corpus fills every pair and is idempotent") {
  std::vector<ItemRecord> items;
  for (const auto& [id, item] : two_item_table()) items.push_back(item);
  std::vector<NeighborSet> neighbors = {{"m1", {{"m2", 0.4}}, 3},
                                        {"m2", {{"m1", 0.4}}, 3}};
  MockProvider provider(42, comedy_lexicon(), two_item_table());
  const auto registry = PromptRegistry::canonical();
  AugmentationCache cache;
  CompletionParams params;

  const auto report =
      augment_corpus(items, neighbors, provider, params, registry, cache);
  CHECK(report.requested == 16);  // 2 items x 8 strategies
  CHECK(report.generated == 16);
  CHECK(report.cached_hits == 0);
  CHECK(report.failed == 0);
  CHECK(cache.size() == 16);

  SUBCASE("rerun touches the provider zero times") {
    const auto calls_before = provider.calls();
    const auto again =
        augment_corpus(items, neighbors, provider, params, registry, cache);
    CHECK(again.cached_hits == 16);
    CHECK(again.generated == 0);
    CHECK(provider.calls() == calls_before);
  }
  SUBCASE("changing params generates fresh records") {
    CompletionParams other = params;
    other.temperature = 0.9;
    const auto again =
        augment_corpus(items, neighbors, provider, other, registry, cache);
    CHECK(again.generated == 16);
    CHECK(cache.size() == 32);
  }
  SUBCASE("parallel execution produces the same record set") {
    AugmentationCache parallel_cache;
    MockProvider parallel_provider(42, comedy_lexicon(), two_item_table());
    AugmentOptions options;
    options.jobs = 4;
    const auto par = augment_corpus(items, neighbors, parallel_provider, params,
                                    registry, parallel_cache, options);
    CHECK(par.generated == 16);
    for (const auto& rec : cache.records()) {
      const auto* other =
          parallel_cache.find(rec.item_id, rec.strategy, rec.variant_tag,
                              rec.model_tag, rec.params_hash);
      REQUIRE(other != nullptr);
      CHECK(other->response == rec.response);
    }
  }
}

TEST_CASE("augment_corpus records partial failures") {
  std::vector<ItemRecord> items;
  for (const auto& [id, item] : two_item_table()) items.push_back(item);
  std::vector<NeighborSet> neighbors = {{"m1", {}, 3}, {"m2", {}, 3}};

  // Fails exactly once, fatally: one pair is lost, the rest proceed.
  class OneFatal : public CompletionProvider {
   public:
    std::string complete(const RenderedPrompt& p,
                         const CompletionParams&) override {
      ++calls_;
      if (p.item_id == "m1" && p.strategy == Strategy::tag) {
        throw ProviderError(ProviderError::Kind::fatal, "boom");
      }
      return "fine";
    }
    std::string name() const override { return "one-fatal"; }
  } provider;

  AugmentationCache cache;
  const auto report = augment_corpus(items, neighbors, provider, {},
                                     PromptRegistry::canonical(), cache);
  CHECK(report.failed == 1);
  CHECK(report.generated == 15);
  CHECK(report.fatal);
  REQUIRE(report.failures.size() == 1);
  CHECK(report.failures[0].find("m1/tag") == 0);
}

TEST_CASE("items with only a title are bootstrapped first") {
  std::vector<ItemRecord> items = {
      {"m7", "", {{"title", "The Hidden Door"}}}};
  MockProvider provider(42, {}, {});
  AugmentationCache cache;
  AugmentOptions options;
  options.strategies = {Strategy::para};
  const auto report = augment_corpus(items, {{"m7", {}, 3}}, provider, {},
                                     PromptRegistry::canonical(), cache,
                                     options);
  CHECK(report.requested == 2);  // bootstrap + para
  CHECK(report.generated == 2);
  const auto* boot =
      cache.find("m7", "bootstrap", "", "mock", params_digest({}));
  REQUIRE(boot != nullptr);
  CHECK(boot->response.find("The Hidden Door") != std::string::npos);
  const auto* para = cache.find("m7", "para", "", "mock", params_digest({}));
  REQUIRE(para != nullptr);
  // The paraphrase prompt was rendered over the bootstrapped description.
  CHECK(para->response.find("The Hidden Door") != std::string::npos);
}

}  // TEST_SUITE
