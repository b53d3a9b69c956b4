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

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Built-in audio-caption vocabulary, stopword list and synonym table backing
// the mock backend and the semantic gate.
namespace pppr::lexicon {

bool in_dictionary(std::string_view lower_word);
// Position in the priority order; earlier words win spelling ties.
std::size_t dictionary_rank(std::string_view lower_word);
std::size_t dictionary_size();

bool is_stopword(std::string_view lower_word);

// Paraphrase alternatives for a lowercase word, or empty.
const std::vector<std::string>& synonyms(std::string_view lower_word);
// Every word that has paraphrase alternatives, in table order.
std::vector<std::string> synonym_heads();

// Light suffix stripping: -ies, -ing, -ed, -es (after sibilants), -s.
std::string stem(std::string_view lower_word);

// Synonym-group representative after stemming; words outside the table map
// to their own stem.
std::string canonical(std::string_view lower_word);

}  // namespace pppr::lexicon
