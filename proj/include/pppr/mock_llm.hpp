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

#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Deterministic rule-based realizations of the LLM behaviors the pipeline
// asks for. MockBackend dispatches prompts to these.
namespace pppr::mock {

// Fixture table first, then synonym substitution plus one of four sentence
// templates selected by variant (1..4). shift rotates the synonym choice;
// the gateway uses it for retry attempts.
std::string paraphrase(std::string_view text, int variant, int shift = 0);

struct SpellFix {
  std::string misspelled;
  std::string corrected;
  bool operator==(const SpellFix&) const = default;
};

// Replaces alphabetic tokens (length >= 3) missing from the dictionary by a
// dictionary word at Damerau distance 1. Capitalization is carried over.
std::pair<std::string, std::vector<SpellFix>> spell_correct(std::string_view text);

// Splits a caption into sound-event spans at connectives and commas. Each
// event is a verbatim substring of the input.
std::vector<std::string> extract_events(std::string_view text);

// Returns the fixture supplementation for an event, or the event unchanged.
std::string supplement(std::string_view event);

}  // namespace pppr::mock
