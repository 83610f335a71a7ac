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

#include <map>
#include <string>
#include <vector>

#include "textrec/encoder.hpp"

namespace textrec {

// How the per-item feature vector is assembled from the original-description
// embedding and the augmented-response embeddings. Component order is fixed:
// [original, para, tag, infer, para_rec, tag_rec, infer_rec, eng, rec_eng],
// subset-filtered by kind. `single` concatenates the original with one named
// response component, matching the per-strategy ablation convention.
enum class FusionKind {
  original_only,
  single,
  concat_basic,
  concat_rec,
  concat_all,
  duplication,
  text_concat,
};

struct FusionStrategy {
  FusionKind kind = FusionKind::original_only;
  std::string component;  // response component for `single`, else unused
};

std::string to_string(const FusionStrategy& s);
FusionStrategy fusion_from_string(const std::string& id);

const std::vector<std::string>& canonical_component_order();

/// Components required by a fusion strategy, in canonical order. For
/// duplication this is "original" repeated to match concat_all's width.
std::vector<std::string> components_for(const FusionStrategy& s);

struct LayoutEntry {
  std::string component;
  std::size_t offset = 0;
  std::size_t length = 0;
};

struct FusedVector {
  std::vector<float> values;
  std::vector<LayoutEntry> layout;  // contiguous and exhaustive
};

/// Concatenates the required components in canonical order. Extra entries
/// in `components` are ignored; missing required ones raise
/// MissingComponentError.
FusedVector fuse(const FusionStrategy& strategy,
                 const std::map<std::string, std::vector<float>>& components);

/// The original embedding repeated target_components times: a
/// dimension-matched control for concatenation gains.
std::vector<float> duplication_baseline(const std::vector<float>& original,
                                        std::size_t target_components = 9);

/// Encodes the newline-joined concatenation of the original text and the
/// responses (canonical order); output length is the encoder dim D, not a
/// multiple of it.
std::vector<float> text_concat_baseline(const TextEncoder& encoder,
                                        const std::string& original_text,
                                        const std::vector<std::string>& responses);

/// Per-item component embeddings, persisted as a row-major float32 matrix
/// plus a JSON index. Row i holds item_ids[i]'s components back to back.
struct ComponentTable {
  std::size_t dim = 0;  // per-component width D
  std::vector<std::string> item_ids;
  std::vector<std::string> components;  // block order within a row
  std::vector<float> data;              // item_ids.size() × components.size() × dim

  std::size_t row_width() const { return components.size() * dim; }
  /// Copy of one component block of one item.
  std::vector<float> component_of(std::size_t item_index,
                                  const std::string& component) const;
  std::map<std::string, std::vector<float>> components_of(
      std::size_t item_index) const;
};

/// Writes base_path + ".f32" (little-endian float32) and
/// base_path + ".index.json".
void save_embeddings(const std::string& base_path, const ComponentTable& table,
                     const std::string& config_digest = "");
ComponentTable load_embeddings(const std::string& base_path,
                               std::string* config_digest = nullptr);

}  // namespace textrec
