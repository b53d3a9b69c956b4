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
#include <vector>

namespace pppr::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// Lowercases and collapses runs of whitespace; the key used for caption
// de-duplication.
std::string normalize(std::string_view s);

// Splits on every non-alphanumeric byte. Non-ASCII bytes are treated as
// alphanumeric so UTF-8 words stay intact.
std::vector<std::string> alnum_tokens(std::string_view s);

// Whitespace-separated words.
std::vector<std::string> words(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool starts_with_ci(std::string_view s, std::string_view prefix);

// Case-insensitive search for needle in haystack starting at from.
std::size_t find_ci(std::string_view haystack, std::string_view needle,
                    std::size_t from = 0);

}  // namespace pppr::text
