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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace pppr {

enum class Origin { kHuman, kAugmented, kRegularized };
enum class Split { kTrain, kVal, kTest };

std::string_view to_string(Origin o);
std::string_view to_string(Split s);
Origin parse_origin(std::string_view s);
Split parse_split(std::string_view s);

// One text description bound to a clip.
struct CaptionRecord {
  std::string clip_id;
  std::string text;
  Origin origin = Origin::kHuman;
  // Index (within the clip's caption sequence) of the caption this one was
  // derived from. Absent for human captions.
  std::optional<std::size_t> parent_index;
  std::optional<int> rewrite_index;

  bool operator==(const CaptionRecord&) const = default;
};

// Throws ValidationError when a record breaks the lineage or text rules.
void validate(const CaptionRecord& rec);

struct ClipEntry {
  std::string clip_id;
  std::optional<std::string> audio_path;
  std::vector<CaptionRecord> captions;

  bool operator==(const ClipEntry&) const = default;
};

struct DatasetManifest {
  Split split = Split::kTrain;
  std::vector<ClipEntry> entries;

  std::size_t caption_count() const;
  bool operator==(const DatasetManifest&) const = default;
};

// Reads a JSONL manifest. Records are grouped by clip_id in first-appearance
// order; caption order within a clip follows line order.
DatasetManifest load_manifest(const std::filesystem::path& path, Split split);
DatasetManifest parse_manifest(std::string_view jsonl, Split split);

// Canonical JSONL serialization: fixed key order, LF endings. Output is
// byte-stable for equal manifests.
std::string serialize_manifest(const DatasetManifest& m);
void save_manifest(const std::filesystem::path& path, const DatasetManifest& m);

struct MergeResult {
  DatasetManifest manifest;
  std::size_t accepted = 0;
  std::size_t dropped_duplicates = 0;
};

// Appends augmented rewrites to their clips. Unknown clips raise LinkError;
// rewrites duplicating an existing caption (after normalization) are dropped
// and counted.
MergeResult merge_augmented(const DatasetManifest& base,
                            const std::vector<CaptionRecord>& rewrites);

// Deterministic uniform choice over the entry's captions keyed on
// (seed, epoch, clip_id).
const CaptionRecord& sample_training_caption(const ClipEntry& entry,
                                             std::int64_t epoch,
                                             std::uint64_t seed);
std::size_t caption_selection_index(std::string_view clip_id,
                                    std::size_t caption_count,
                                    std::int64_t epoch, std::uint64_t seed);

struct StatsReport {
  std::size_t clips = 0;
  std::size_t captions = 0;
  std::map<std::size_t, std::size_t> captions_per_clip;
  std::size_t human = 0;
  std::size_t augmented = 0;
  std::size_t regularized = 0;

  bool operator==(const StatsReport&) const = default;
};

StatsReport manifest_stats(const DatasetManifest& m);
nlohmann::ordered_json to_json(const StatsReport& s);

}  // namespace pppr
