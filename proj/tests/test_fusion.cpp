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

#include "textrec/fusion.hpp"

#include <doctest.h>

#include <filesystem>

#include "textrec/analysis.hpp"
#include "textrec/errors.hpp"

using namespace textrec;

namespace {

std::map<std::string, std::vector<float>> full_components(std::size_t dim) {
  std::map<std::string, std::vector<float>> out;
  float fill = 1.0f;
  for (const auto& name : canonical_component_order()) {
    out[name] = std::vector<float>(dim, fill);
    fill += 1.0f;
  }
  return out;
}

}  // namespace

TEST_SUITE("fusion") {

TEST_CASE("concat_all at D=128 is 1152 wide") {
  const auto fused =
      fuse({FusionKind::concat_all, ""}, full_components(128));
  CHECK(fused.values.size() == 1152);
  CHECK(fused.layout.size() == 9);
}

TEST_CASE("component subsets follow the canonical order") {
  const auto dim = std::size_t{4};
  const auto components = full_components(dim);

  SUBCASE("original_only is the identity") {
    const auto fused = fuse({FusionKind::original_only, ""}, components);
    CHECK(fused.values == components.at("original"));
  }
  SUBCASE("concat_basic") {
    const auto fused = fuse({FusionKind::concat_basic, ""}, components);
    CHECK(fused.values.size() == 4 * dim);
    CHECK(fused.layout[0].component == "original");
    CHECK(fused.layout[1].component == "para");
    CHECK(fused.layout[2].component == "tag");
    CHECK(fused.layout[3].component == "infer");
  }
  SUBCASE("concat_rec") {
    const auto fused = fuse({FusionKind::concat_rec, ""}, components);
    CHECK(fused.layout[1].component == "para_rec");
    CHECK(fused.layout[3].component == "infer_rec");
  }
  SUBCASE("single pairs the original with one response") {
    const auto fused = fuse({FusionKind::single, "eng"}, components);
    CHECK(fused.values.size() == 2 * dim);
    CHECK(fused.layout[0].component == "original");
    CHECK(fused.layout[1].component == "eng");
  }
}

TEST_CASE("missing components are an error") {
  auto components = full_components(4);
  components.erase("tag");
  CHECK_THROWS_AS(fuse({FusionKind::concat_basic, ""}, components),
                  MissingComponentError);
  CHECK_NOTHROW(fuse({FusionKind::concat_rec, ""}, components));
}

TEST_CASE("layout audit: slicing and reconcatenating is bitwise identity") {
  const auto components = full_components(8);
  for (const auto kind :
       {FusionKind::original_only, FusionKind::concat_basic,
        FusionKind::concat_rec, FusionKind::concat_all}) {
    const auto fused = fuse({kind, ""}, components);
    std::vector<float> rebuilt;
    std::size_t expected_offset = 0;
    for (const auto& entry : fused.layout) {
      CHECK(entry.offset == expected_offset);
      expected_offset += entry.length;
      rebuilt.insert(rebuilt.end(), fused.values.begin() + entry.offset,
                     fused.values.begin() + entry.offset + entry.length);
    }
    CHECK(expected_offset == fused.values.size());
    CHECK(rebuilt == fused.values);
  }
}

TEST_CASE("input map order cannot matter (canonical order governs)") {
  // std::map iterates sorted, so feed the same data under reversed
  // insertion and through an enlarged map with extras.
  auto components = full_components(4);
  auto enlarged = components;
  enlarged["zzz_extra"] = std::vector<float>(4, 99.0f);
  CHECK(fuse({FusionKind::concat_all, ""}, components).values ==
        fuse({FusionKind::concat_all, ""}, enlarged).values);
}

TEST_CASE("duplication repeats the original and preserves angles") {
  std::vector<float> v = {1.0f, 0.0f, 1.0f};
  const auto nine = duplication_baseline(v, 9);
  CHECK(nine.size() == 27);
  for (std::size_t i = 0; i < nine.size(); ++i) {
    CHECK(nine[i] == v[i % 3]);
  }
  CHECK(duplication_baseline(v, 1) == v);

  std::vector<float> w = {0.5f, 0.5f, -1.0f};
  CHECK(cosine_similarity(duplication_baseline(v, 9),
                          duplication_baseline(w, 9)) ==
        doctest::Approx(cosine_similarity(v, w)).epsilon(1e-6));

  SUBCASE("matches concat_all width") {
    const auto components = full_components(16);
    const auto all = fuse({FusionKind::concat_all, ""}, components);
    CHECK(duplication_baseline(components.at("original"),
                               canonical_component_order().size())
              .size() == all.values.size());
  }
}

TEST_CASE("text_concat encodes the joined text at width D") {
  HashEncoder encoder(16, 3);
  const auto v =
      text_concat_baseline(encoder, "original", {"original"});
  CHECK(v.size() == 16);
  CHECK(v == encoder.encode("original\noriginal"));
  const auto many = text_concat_baseline(
      encoder, "original", {"r1", "r2", "r3", "r4", "r5", "r6", "r7", "r8"});
  CHECK(many.size() == 16);  // D regardless of response count
}

TEST_CASE("embedding files round trip") {
  ComponentTable table;
  table.dim = 4;
  table.item_ids = {"a", "b"};
  table.components = {"original", "para"};
  for (float x = 0; x < 16; ++x) table.data.push_back(x * 0.5f);

  const auto base =
      (std::filesystem::temp_directory_path() / "emb_rt").string();
  save_embeddings(base, table, "digest123");
  std::string digest;
  const auto loaded = load_embeddings(base, &digest);
  CHECK(digest == "digest123");
  CHECK(loaded.dim == table.dim);
  CHECK(loaded.item_ids == table.item_ids);
  CHECK(loaded.components == table.components);
  CHECK(loaded.data == table.data);
  CHECK(loaded.component_of(1, "para") ==
        std::vector<float>{6.0f, 6.5f, 7.0f, 7.5f});
}

}  // TEST_SUITE
