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

#include "pppr/dataset.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "pppr/error.hpp"
#include "pppr/hash.hpp"
#include "pppr/text.hpp"

namespace pppr {

using nlohmann::json;

std::string_view to_string(Origin o) {
  switch (o) {
    case Origin::kHuman: return "human";
    case Origin::kAugmented: return "augmented";
    case Origin::kRegularized: return "regularized";
  }
  return "human";
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

Origin parse_origin(std::string_view s) {
  if (s == "human") return Origin::kHuman;
  if (s == "augmented") return Origin::kAugmented;
  if (s == "regularized") return Origin::kRegularized;
  throw ValidationError("unknown origin '" + std::string(s) + "'");
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "val") return Split::kVal;
  if (s == "test") return Split::kTest;
  throw ConfigError("unknown split '" + std::string(s) + "'");
}

void validate(const CaptionRecord& rec) {
  if (rec.clip_id.empty()) throw ValidationError("empty clip_id");
  if (text::trim(rec.text).empty()) {
    throw ValidationError("clip " + rec.clip_id + ": caption text is empty");
  }
  if (rec.origin == Origin::kHuman && rec.parent_index) {
    throw ValidationError("clip " + rec.clip_id +
                          ": human caption cannot carry parent_index");
  }
  if (rec.origin == Origin::kAugmented && !rec.parent_index) {
    throw ValidationError("clip " + rec.clip_id +
                          ": augmented caption requires parent_index");
  }
  if (rec.rewrite_index && *rec.rewrite_index < 1) {
    throw ValidationError("clip " + rec.clip_id + ": rewrite_index must be >= 1");
  }
}

std::size_t DatasetManifest::caption_count() const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.captions.size();
  return n;
}

namespace {

template <typename T>
std::optional<T> optional_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

CaptionRecord record_from_json(const json& j, std::optional<std::string>& audio) {
  if (!j.is_object()) throw json::type_error::create(302, "record is not an object", &j);
  CaptionRecord rec;
  rec.clip_id = j.at("clip_id").get<std::string>();
  rec.text = j.at("caption").get<std::string>();
  rec.origin = parse_origin(j.at("origin").get<std::string>());
  if (auto p = optional_field<std::int64_t>(j, "parent_index")) {
    if (*p < 0) throw ValidationError("negative parent_index");
    rec.parent_index = static_cast<std::size_t>(*p);
  }
  if (auto r = optional_field<std::int64_t>(j, "rewrite_index")) {
    rec.rewrite_index = static_cast<int>(*r);
  }
  audio = optional_field<std::string>(j, "audio_path");
  return rec;
}

// Appends rec to entry after the clip-level checks.
void append_checked(ClipEntry& entry, CaptionRecord rec,
                    std::unordered_set<std::string>& seen) {
  if (entry.captions.empty() && rec.origin != Origin::kHuman) {
    throw ValidationError("clip " + rec.clip_id +
                          ": first caption must have human origin");
  }
  if (rec.parent_index && *rec.parent_index >= entry.captions.size()) {
    throw ValidationError("clip " + rec.clip_id + ": parent_index " +
                          std::to_string(*rec.parent_index) +
                          " does not refer to an earlier caption");
  }
  if (!seen.insert(text::normalize(rec.text)).second) {
    throw ValidationError("clip " + rec.clip_id + ": duplicate caption '" +
                          rec.text + "'");
  }
  entry.captions.push_back(std::move(rec));
}

}  // namespace

DatasetManifest parse_manifest(std::string_view jsonl, Split split) {
  DatasetManifest m;
  m.split = split;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::unordered_set<std::string>> seen;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    std::size_t eol = jsonl.find('\n', pos);
    if (eol == std::string_view::npos) eol = jsonl.size();
    std::string_view line = jsonl.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text::trim(line).empty()) continue;

    CaptionRecord rec;
    std::optional<std::string> audio;
    try {
      rec = record_from_json(json::parse(line), audio);
    } catch (const json::exception& e) {
      throw ParseError(e.what(), line_no);
    }
    try {
      validate(rec);
      auto [it, fresh] = index.try_emplace(rec.clip_id, m.entries.size());
      if (fresh) {
        m.entries.push_back(ClipEntry{rec.clip_id, audio, {}});
        seen.emplace_back();
      }
      ClipEntry& entry = m.entries[it->second];
      if (!entry.audio_path && audio) entry.audio_path = audio;
      append_checked(entry, std::move(rec), seen[it->second]);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path, Split split) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open manifest " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str(), split);
}

std::string serialize_manifest(const DatasetManifest& m) {
  std::string out;
  for (const auto& e : m.entries) {
    for (const auto& c : e.captions) {
      nlohmann::ordered_json j;
      j["clip_id"] = c.clip_id;
      j["audio_path"] = e.audio_path ? json(*e.audio_path) : json(nullptr);
      j["caption"] = c.text;
      j["origin"] = std::string(to_string(c.origin));
      j["parent_index"] = c.parent_index ? json(*c.parent_index) : json(nullptr);
      j["rewrite_index"] = c.rewrite_index ? json(*c.rewrite_index) : json(nullptr);
      out += j.dump();
      out += '\n';
    }
  }
  return out;
}

void save_manifest(const std::filesystem::path& path, const DatasetManifest& m) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write manifest " + path.string());
  out << serialize_manifest(m);
  if (!out) throw DataError("short write to " + path.string());
}

MergeResult merge_augmented(const DatasetManifest& base,
                            const std::vector<CaptionRecord>& rewrites) {
  MergeResult r{base, 0, 0};
  if (rewrites.empty()) return r;

  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < r.manifest.entries.size(); ++i) {
    index.emplace(r.manifest.entries[i].clip_id, i);
  }
  std::unordered_map<std::size_t, std::unordered_set<std::string>> seen;
  for (const auto& rw : rewrites) {
    auto it = index.find(rw.clip_id);
    if (it == index.end()) {
      throw LinkError("rewrite refers to unknown clip '" + rw.clip_id + "'");
    }
    if (rw.origin != Origin::kAugmented) {
      throw ValidationError("clip " + rw.clip_id +
                            ": merged rewrite must have augmented origin");
    }
    validate(rw);
    ClipEntry& entry = r.manifest.entries[it->second];
    auto [sit, fresh] = seen.try_emplace(it->second);
    if (fresh) {
      for (const auto& c : entry.captions) sit->second.insert(text::normalize(c.text));
    }
    if (*rw.parent_index >= entry.captions.size()) {
      throw ValidationError("clip " + rw.clip_id + ": parent_index out of range");
    }
    if (!sit->second.insert(text::normalize(rw.text)).second) {
      ++r.dropped_duplicates;
      continue;
    }
    entry.captions.push_back(rw);
    ++r.accepted;
  }
  return r;
}

std::size_t caption_selection_index(std::string_view clip_id,
                                    std::size_t caption_count,
                                    std::int64_t epoch, std::uint64_t seed) {
  require(caption_count > 0, "cannot sample from an empty caption sequence");
  const std::uint64_t words[] = {seed, static_cast<std::uint64_t>(epoch)};
  return static_cast<std::size_t>(stream_hash(words, clip_id) % caption_count);
}

const CaptionRecord& sample_training_caption(const ClipEntry& entry,
                                             std::int64_t epoch,
                                             std::uint64_t seed) {
  require(!entry.captions.empty(),
          "clip " + entry.clip_id + " has no captions to sample");
  return entry.captions[caption_selection_index(entry.clip_id,
                                                entry.captions.size(), epoch, seed)];
}

StatsReport manifest_stats(const DatasetManifest& m) {
  StatsReport s;
  const auto n = static_cast<std::ptrdiff_t>(m.entries.size());
  std::size_t captions = 0, human = 0, augmented = 0, regularized = 0;
#pragma omp parallel for reduction(+ : captions, human, augmented, regularized) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& e = m.entries[static_cast<std::size_t>(i)];
    captions += e.captions.size();
    for (const auto& c : e.captions) {
      switch (c.origin) {
        case Origin::kHuman: ++human; break;
        case Origin::kAugmented: ++augmented; break;
        case Origin::kRegularized: ++regularized; break;
      }
    }
  }
  for (const auto& e : m.entries) ++s.captions_per_clip[e.captions.size()];
  s.clips = m.entries.size();
  s.captions = captions;
  s.human = human;
  s.augmented = augmented;
  s.regularized = regularized;
  return s;
}

nlohmann::ordered_json to_json(const StatsReport& s) {
  nlohmann::ordered_json j;
  j["clips"] = s.clips;
  j["captions"] = s.captions;
  nlohmann::ordered_json hist = nlohmann::ordered_json::object();
  for (const auto& [k, v] : s.captions_per_clip) hist[std::to_string(k)] = v;
  j["captions_per_clip"] = hist;
  j["origin"] = {{"human", s.human},
                 {"augmented", s.augmented},
                 {"regularized", s.regularized}};
  return j;
}

}  // namespace pppr
