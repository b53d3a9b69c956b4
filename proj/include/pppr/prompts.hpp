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

#include <string_view>

// Prompt texts shared by the request builders and the mock backend that
// answers them.
namespace pppr::prompts {

inline constexpr std::string_view kRewrite =
    "Rewrite the following text description using different wording while "
    "preserving the same meaning.";

inline constexpr std::string_view kCotHeader =
    "Reasoning with the following prompts step by step.\n"
    "1.First, check for spelling errors. Correct any found.\n"
    "2.Then, extract sound events from the input text.\n"
    "3.Review each event description for completeness and accuracy. "
    "Supplement inaccurate or incomplete description.";

inline constexpr std::string_view kStepMarker = "Current step: ";
inline constexpr std::string_view kInputMarker = "Input:\n";

inline constexpr std::string_view kCorrectedTag = "CORRECTED:";
inline constexpr std::string_view kFixesTag = "FIXES:";
inline constexpr std::string_view kEventsTag = "EVENTS:";

}  // namespace pppr::prompts
