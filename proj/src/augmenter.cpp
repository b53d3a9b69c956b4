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

#include "pppr/augmenter.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <set>
#include <unordered_set>

#include "pppr/error.hpp"
#include "pppr/hash.hpp"
#include "pppr/lexicon.hpp"
#include "pppr/prompts.hpp"
#include "pppr/text.hpp"

namespace pppr {

void validate(const AugmentationPolicy& p) {
  if (p.n_rewrites < 1) throw ConfigError("n_rewrites must be at least 1");
  if (!(p.gate_threshold >= 0.0 && p.gate_threshold <= 1.0)) {
    throw ConfigError("gate threshold must lie in [0, 1]");
  }
  if (p.max_attempts_per_rewrite < 1) {
    throw ConfigError("max_attempts_per_rewrite must be at least 1");
  }
  if (!(p.clip_fraction > 0.0 && p.clip_fraction <= 1.0)) {
    throw ConfigError("clip fraction must lie in (0, 1]");
  }
  if (!std::isfinite(p.temperature) || p.temperature < 0.0) {
    throw ConfigError("temperature must be finite and non-negative");
  }
  if (p.max_tokens < 1) throw ConfigError("max_tokens must be positive");
}

PromptRequest build_rewrite_prompt(std::string_view caption) {
  const std::string body = text::trim(caption);
  require(!body.empty(), "caption to rewrite is empty");
  PromptRequest req;
  req.user_text = std::string(prompts::kRewrite) + "\n\n" + body;
  req.temperature = 0.9;
  req.max_tokens = 128;
  return req;
}

std::vector<std::string> content_tokens(std::string_view s) {
  std::set<std::string> out;
  for (const auto& tok : text::alnum_tokens(s)) {
    const std::string lw = text::to_lower(tok);
    if (lexicon::is_stopword(lw)) continue;
    out.insert(lexicon::canonical(lw));
  }
  return {out.begin(), out.end()};
}

GateResult semantic_gate(std::string_view original, std::string_view rewrite,
                         double threshold) {
  require(!text::trim(original).empty() && !text::trim(rewrite).empty(),
          "semantic gate needs two nonempty texts");
  const auto a = content_tokens(original);
  const auto b = content_tokens(rewrite);
  double score;
  if (a.empty() && b.empty()) {
    score = text::normalize(original) == text::normalize(rewrite) ? 1.0 : 0.0;
  } else {
    std::vector<std::string> inter;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(inter));
    const std::size_t uni = a.size() + b.size() - inter.size();
    score = static_cast<double>(inter.size()) / static_cast<double>(uni);
  }
  return {score >= threshold, score};
}

namespace {

// Trims, keeps the first nonempty line and drops one pair of wrapping quotes.
std::string clean_completion(std::string_view raw) {
  std::string s = text::trim(raw);
  if (auto nl = s.find('\n'); nl != std::string::npos) s = text::trim(s.substr(0, nl));
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    s = text::trim(s.substr(1, s.size() - 2));
  }
  return s;
}

bool clip_selected(const std::string& clip_id, const AugmentationPolicy& p) {
  if (p.clip_fraction >= 1.0) return true;
  const std::uint64_t words[] = {p.seed, 0x617567ULL};
  const double u = static_cast<double>(stream_hash(words, clip_id) >> 11) * 0x1.0p-53;
  return u < p.clip_fraction;
}

}  // namespace

CaptionAugmentation augment_caption(LlmGateway& gateway, const CaptionRecord& caption,
                                    std::size_t parent_index,
                                    const AugmentationPolicy& policy) {
  validate(policy);
  require(caption.origin == Origin::kHuman, "only human captions are rewritten");
  CaptionAugmentation out;
  const PromptRequest base = [&] {
    PromptRequest r = build_rewrite_prompt(caption.text);
    r.temperature = policy.temperature;
    r.max_tokens = policy.max_tokens;
    return r;
  }();
  const std::string original_norm = text::normalize(text::trim(caption.text));
  std::unordered_set<std::string> taken{original_norm};

  for (int slot = 1; slot <= policy.n_rewrites; ++slot) {
    bool filled = false;
    for (int attempt = 0; attempt < policy.max_attempts_per_rewrite && !filled; ++attempt) {
      PromptRequest req = base;
      req.variant_tag = attempt == 0 ? std::to_string(slot)
                                     : std::to_string(slot) + "." + std::to_string(attempt);
      const std::string candidate = clean_completion(gateway.complete(req).text);
      const std::string norm = text::normalize(candidate);
      if (candidate.empty() || norm == original_norm) {
        ++out.rejected_identical;
        continue;
      }
      if (taken.count(norm)) {
        ++out.rejected_duplicate;
        continue;
      }
      if (policy.semantic_gate_enabled &&
          !semantic_gate(caption.text, candidate, policy.gate_threshold).accepted) {
        ++out.rejected_by_gate;
        continue;
      }
      taken.insert(norm);
      CaptionRecord rec;
      rec.clip_id = caption.clip_id;
      rec.text = candidate;
      rec.origin = Origin::kAugmented;
      rec.parent_index = parent_index;
      rec.rewrite_index = static_cast<int>(out.rewrites.size()) + 1;
      out.rewrites.push_back(std::move(rec));
      filled = true;
    }
    if (!filled) ++out.exhausted_slots;
  }
  return out;
}

ManifestAugmentation augment_manifest(LlmGateway& gateway,
                                      const DatasetManifest& manifest,
                                      const AugmentationPolicy& policy) {
  validate(policy);
  require(manifest.split == Split::kTrain, "augmentation applies to the train split only");

  const std::size_t n = manifest.entries.size();
  std::vector<CaptionAugmentation> per_clip(n);
  std::vector<std::exception_ptr> errors(n);
  std::vector<char> selected(n, 0);

#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const ClipEntry& entry = manifest.entries[idx];
    try {
      if (entry.captions.empty() || !clip_selected(entry.clip_id, policy)) continue;
      selected[idx] = 1;
      per_clip[idx] = augment_caption(gateway, entry.captions.front(), 0, policy);
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ManifestAugmentation out;
  std::vector<CaptionRecord> rewrites;
  for (std::size_t i = 0; i < n; ++i) {
    auto& c = per_clip[i];
    out.clips_augmented += selected[i];
    out.exhausted_slots += c.exhausted_slots;
    out.rejected_identical += c.rejected_identical;
    out.rejected_duplicate += c.rejected_duplicate;
    out.rejected_by_gate += c.rejected_by_gate;
    std::move(c.rewrites.begin(), c.rewrites.end(), std::back_inserter(rewrites));
  }
  MergeResult merged = merge_augmented(manifest, rewrites);
  out.manifest = std::move(merged.manifest);
  out.rewrites_accepted = merged.accepted;
  out.dropped_at_merge = merged.dropped_duplicates;
  return out;
}

}  // namespace pppr
