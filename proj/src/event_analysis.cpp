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

#include "pppr/event_analysis.hpp"

#include <algorithm>
#include <fstream>

#include "pppr/error.hpp"
#include "pppr/text.hpp"

namespace pppr {
namespace {

constexpr std::string_view kPrefixStem = "follow";

}  // namespace

TemporalLexicon::TemporalLexicon()
    : ids_{"when", "while", "before", "after", "then", "follow", "during"} {}

TemporalLexicon::TemporalLexicon(std::vector<std::string> identifiers) {
  for (auto& id : identifiers) {
    std::string t = text::to_lower(text::trim(id));
    if (t.empty()) continue;
    if (std::find(ids_.begin(), ids_.end(), t) == ids_.end()) ids_.push_back(std::move(t));
  }
  if (ids_.empty()) throw ConfigError("temporal lexicon is empty");
}

TemporalLexicon TemporalLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open lexicon " + path.string());
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = text::trim(line);
    if (t.empty() || t[0] == '#') continue;
    ids.push_back(std::move(t));
  }
  return TemporalLexicon(std::move(ids));
}

TemporalClassification classify_temporal(std::string_view caption,
                                         const TemporalLexicon& lex) {
  require(!text::trim(caption).empty(), "caption to classify is empty");
  std::vector<std::string> tokens;
  for (auto& t : text::alnum_tokens(caption)) tokens.push_back(text::to_lower(t));

  TemporalClassification out;
  for (const auto& id : lex.identifiers()) {
    const bool prefix = id == kPrefixStem;
    const bool hit = std::any_of(tokens.begin(), tokens.end(), [&](const std::string& tok) {
      return prefix ? tok.rfind(id, 0) == 0 : tok == id;
    });
    if (hit) out.matched.push_back(id);
  }
  out.cls = out.matched.empty() ? EventClass::kSingleEvent : EventClass::kMultiEvent;
  return out;
}

EventSplit split_by_events(const DatasetManifest& manifest, const TemporalLexicon& lex) {
  const std::size_t n = manifest.entries.size();
  std::vector<char> multi(n, 0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const auto& e = manifest.entries[static_cast<std::size_t>(i)];
    if (e.captions.empty()) continue;
    multi[static_cast<std::size_t>(i)] =
        classify_temporal(e.captions.front().text, lex).cls == EventClass::kMultiEvent;
  }
  EventSplit out;
  out.multi.split = out.single.split = manifest.split;
  for (std::size_t i = 0; i < n; ++i) {
    (multi[i] ? out.multi : out.single).entries.push_back(manifest.entries[i]);
  }
  return out;
}

}  // namespace pppr
