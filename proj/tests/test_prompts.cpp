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

#include "textrec/prompts.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "textrec/errors.hpp"

using namespace textrec;

namespace {

const char* kSampleDescription =
    "A lighthouse keeper trades letters with a ship that never docks.";

NeighborDescriptions sample_neighbors() {
  return {
      {"n1", "A clockmaker repairs the town's memories every midnight."},
      {"n2", "Two strangers share an umbrella through a year of storms."},
      {"n3", "A gardener grows constellations in a rooftop greenhouse."},
  };
}

std::string read_golden(const std::string& name) {
  const std::string path =
      std::string(TEXTREC_TEST_DATA_DIR) + "/prompt_golden/" + name;
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing golden file ", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ItemRecord sample_item() { return {"m1", kSampleDescription, {}}; }

}  // namespace

TEST_SUITE("prompts") {

TEST_CASE("all eight canonical templates match the golden files") {
  const auto registry = PromptRegistry::canonical();
  const auto neighbors = sample_neighbors();
  for (Strategy s : kAllStrategies) {
    const auto* n = needs_neighbors(s) ? &neighbors : nullptr;
    const auto prompt = render_prompt(registry, s, sample_item(), n);
    CHECK_MESSAGE(prompt.text == read_golden(to_string(s) + ".txt"),
                  "strategy ", to_string(s));
    CHECK_FALSE(prompt.degraded);
  }
}

TEST_CASE("strategy families") {
  CHECK(family_of(Strategy::para) == Family::basic);
  CHECK(family_of(Strategy::tag_rec) == Family::rec);
  CHECK(family_of(Strategy::eng) == Family::eng);
  CHECK(family_of(Strategy::rec_eng) == Family::rec_eng);
  CHECK(needs_neighbors(Strategy::eng));
  CHECK(needs_neighbors(Strategy::rec_eng));
  CHECK_FALSE(needs_neighbors(Strategy::infer));
  CHECK(strategy_from_string("para_rec") == Strategy::para_rec);
  CHECK_THROWS_AS(strategy_from_string("nope"), ConfigError);
}

TEST_CASE("description appears verbatim exactly once") {
  const auto registry = PromptRegistry::canonical();
  const auto neighbors = sample_neighbors();
  for (Strategy s : kAllStrategies) {
    const auto* n = needs_neighbors(s) ? &neighbors : nullptr;
    const auto prompt = render_prompt(registry, s, sample_item(), n);
    std::size_t count = 0;
    std::size_t pos = 0;
    while ((pos = prompt.text.find(kSampleDescription, pos)) !=
           std::string::npos) {
      ++count;
      pos += 1;
    }
    CHECK(count == 1);
    if (needs_neighbors(s)) {
      // Target first, then neighbors in score order.
      std::size_t last = prompt.text.find(kSampleDescription);
      for (const auto& [id, desc] : neighbors) {
        const auto at = prompt.text.find(desc);
        REQUIRE(at != std::string::npos);
        CHECK(at > last);
        last = at;
      }
      CHECK(prompt.neighbor_ids ==
            std::vector<std::string>{"n1", "n2", "n3"});
    } else {
      CHECK(prompt.neighbor_ids.empty());
    }
  }
}

TEST_CASE("empty neighbor list degrades instead of failing") {
  const auto registry = PromptRegistry::canonical();
  const NeighborDescriptions none;
  const auto eng = render_prompt(registry, Strategy::eng, sample_item(), &none);
  CHECK(eng.degraded);
  CHECK(eng.text == read_golden("eng_degraded.txt"));
  const auto rec_eng =
      render_prompt(registry, Strategy::rec_eng, sample_item(), &none);
  CHECK(rec_eng.degraded);
  CHECK(rec_eng.text == read_golden("rec_eng_degraded.txt"));
}

TEST_CASE("eng family without a neighbor argument is an error") {
  const auto registry = PromptRegistry::canonical();
  CHECK_THROWS_AS(render_prompt(registry, Strategy::eng, sample_item()),
                  MissingNeighborsError);
}

TEST_CASE("empty description is an error") {
  const auto registry = PromptRegistry::canonical();
  ItemRecord item{"m1", "", {}};
  CHECK_THROWS_AS(render_prompt(registry, Strategy::para, item),
                  EmptyDescriptionError);
}

TEST_CASE("variants render alongside the canonical wording") {
  auto registry = PromptRegistry::canonical();
  registry.register_variant(
      Strategy::para,
      "Summarize the given item description, '{description}', using "
      "different words.",
      "v1");
  const auto prompt =
      render_prompt(registry, Strategy::para, sample_item(), nullptr, "v1");
  CHECK(prompt.text == "Summarize the given item description, '" +
                           std::string(kSampleDescription) +
                           "', using different words.");
  CHECK(prompt.variant_tag == "v1");
  // Canonical is untouched.
  CHECK(render_prompt(registry, Strategy::para, sample_item()).text ==
        read_golden("para.txt"));
}

TEST_CASE("variant templates are validated") {
  auto registry = PromptRegistry::canonical();
  CHECK_THROWS_AS(
      registry.register_variant(Strategy::para, "no slot here", "bad"),
      BadTemplateError);
  CHECK_THROWS_AS(registry.register_variant(
                      Strategy::eng, "only '{description}' given", "bad"),
                  BadTemplateError);
  CHECK_THROWS_AS(registry.register_variant(Strategy::para, "x{description}",
                                            ""),
                  BadTemplateError);
}

TEST_CASE("default variant set covers all strategies") {
  const auto registry = PromptRegistry::with_default_variants();
  const auto neighbors = sample_neighbors();
  for (Strategy s : kAllStrategies) {
    CHECK(registry.variant_tags(s) == std::vector<std::string>{"v1"});
    const auto* n = needs_neighbors(s) ? &neighbors : nullptr;
    const auto prompt = render_prompt(registry, s, sample_item(), n, "v1");
    CHECK(prompt.text.find(kSampleDescription) != std::string::npos);
  }
}

TEST_CASE("registry file round trip") {
  const auto registry = PromptRegistry::with_default_variants();
  const auto path =
      (std::filesystem::temp_directory_path() / "registry_rt.json").string();
  registry.save(path);
  const auto loaded = PromptRegistry::load(path);
  for (Strategy s : kAllStrategies) {
    CHECK(loaded.template_for(s) == registry.template_for(s));
    CHECK(loaded.template_for(s, "v1") == registry.template_for(s, "v1"));
  }
}

TEST_CASE("bootstrap prompt") {
  CHECK(render_bootstrap_description("Gladiator") ==
        read_golden("bootstrap.txt"));
  CHECK_THROWS_AS(render_bootstrap_description(""), EmptyTitleError);
  // Plain substitution: embedded quotes stay verbatim.
  CHECK(render_bootstrap_description("The 'Quoted' One") ==
        "Summarize the movie The 'Quoted' One with one sentence. The answer "
        "cannot include the movie title.");
}

TEST_CASE("rendering is a pure function of its inputs") {
  const auto registry = PromptRegistry::canonical();
  const auto neighbors = sample_neighbors();
  const auto a =
      render_prompt(registry, Strategy::rec_eng, sample_item(), &neighbors);
  const auto b =
      render_prompt(registry, Strategy::rec_eng, sample_item(), &neighbors);
  CHECK(a.text == b.text);
  CHECK(a.neighbor_ids == b.neighbor_ids);
}

}  // TEST_SUITE
