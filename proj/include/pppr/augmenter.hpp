// Copyright 2026 The PPPR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pppr/dataset.hpp"
#include "pppr/llm_gateway.hpp"

namespace pppr {

struct AugmentationPolicy {
  int n_rewrites = 4;
  bool semantic_gate_enabled = false;
  // Jaccard similarity over canonical content tokens.
  double gate_threshold = 0.2;
  int max_attempts_per_rewrite = 3;
  double temperature = 0.9;
  int max_tokens = 128;
  // Fraction of clips to augment; 1.0 rewrites every clip. Subset membership
  // is a hash of (seed, clip_id).
  double clip_fraction = 1.0;
  std::uint64_t seed = 0;
};

// Throws ConfigError when a field is out of range.
void validate(const AugmentationPolicy& policy);

// The rewrite instruction, a blank line, then the trimmed caption.
PromptRequest build_rewrite_prompt(std::string_view caption);

struct GateResult {
  bool accepted = false;
  double score = 0.0;
};

// Content-token set: lowercase alphanumeric tokens, stopwords removed, each
// mapped to its synonym-group representative after light stemming.
std::vector<std::string> content_tokens(std::string_view s);

GateResult semantic_gate(std::string_view original, std::string_view rewrite,
                         double threshold);

struct CaptionAugmentation {
  std::vector<CaptionRecord> rewrites;
  // Rewrite slots left empty after max_attempts.
  std::size_t exhausted_slots = 0;
  std::size_t rejected_identical = 0;
  std::size_t rejected_duplicate = 0;
  std::size_t rejected_by_gate = 0;
};

// Requests up to n_rewrites paraphrases of a human caption. parent_index is
// the caption's position within its clip.
CaptionAugmentation augment_caption(LlmGateway& gateway, const CaptionRecord& caption,
                                    std::size_t parent_index,
                                    const AugmentationPolicy& policy);

struct ManifestAugmentation {
  DatasetManifest manifest;
  std::size_t clips_augmented = 0;
  std::size_t rewrites_accepted = 0;
  std::size_t exhausted_slots = 0;
  std::size_t rejected_identical = 0;
  std::size_t rejected_duplicate = 0;
  std::size_t rejected_by_gate = 0;
  std::size_t dropped_at_merge = 0;
};

// Rewrites each clip's index-0 human caption (clips processed in parallel)
// and merges the results. Output does not depend on processing order.
ManifestAugmentation augment_manifest(LlmGateway& gateway,
                                      const DatasetManifest& manifest,
                                      const AugmentationPolicy& policy);

}  // namespace pppr
