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

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pppr/dataset.hpp"

namespace pppr {

// Lowercase temporal markers. Every entry matches whole tokens except
// "follow", which matches any token starting with it.
class TemporalLexicon {
 public:
  TemporalLexicon();  // when, while, before, after, then, follow, during
  explicit TemporalLexicon(std::vector<std::string> identifiers);

  // One identifier per line; blank lines and '#' comments ignored.
  static TemporalLexicon load(const std::filesystem::path& path);

  const std::vector<std::string>& identifiers() const { return ids_; }

 private:
  std::vector<std::string> ids_;
};

enum class EventClass { kMultiEvent, kSingleEvent };

struct TemporalClassification {
  EventClass cls = EventClass::kSingleEvent;
  // Identifiers that fired, in lexicon order.
  std::vector<std::string> matched;
};

TemporalClassification classify_temporal(std::string_view caption,
                                         const TemporalLexicon& lex);

struct EventSplit {
  DatasetManifest multi;
  DatasetManifest single;
};

// Partitions clips by the class of their index-0 caption.
EventSplit split_by_events(const DatasetManifest& manifest, const TemporalLexicon& lex);

}  // namespace pppr
