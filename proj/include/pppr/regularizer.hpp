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

#include <exception>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "pppr/dataset.hpp"
#include "pppr/error.hpp"
#include "pppr/llm_gateway.hpp"
#include "pppr/mock_llm.hpp"

namespace pppr {

enum class CotStep { kSpell, kExtract, kReview };

std::string_view to_string(CotStep s);

struct SoundEvent {
  std::string text;
  std::size_t index = 0;
  bool operator==(const SoundEvent&) const = default;
};

struct SpellPayload {
  std::string text;
  std::vector<mock::SpellFix> fixes;
  bool operator==(const SpellPayload&) const = default;
};

struct EventsPayload {
  std::vector<std::string> events;
  bool operator==(const EventsPayload&) const = default;
};

using StepPayload = std::variant<SpellPayload, EventsPayload>;

struct StepResult {
  CotStep step = CotStep::kSpell;
  std::string raw_output;
  StepPayload parsed;
  bool ok = false;
  // Extra delimiter lines seen and ignored by the parser.
  std::size_t anomalies = 0;
};

struct RegularizationTrace {
  std::string input_text;
  std::vector<StepResult> steps;
  std::string output_text;
};

nlohmann::ordered_json to_json(const RegularizationTrace& trace);

// Step instructions verbatim, the current step number, the machine-readable
// answer contract for that step and the payload.
PromptRequest build_cot_prompt(CotStep step, std::string_view payload);

// Strict parse of a step answer. Never throws; a malformed answer yields
// ok=false and `fallback` as payload. Supplemented events longer than
// kMaxEventTokens words are truncated.
StepResult parse_step_output(std::string_view raw, CotStep step,
                             const StepPayload& fallback);

inline constexpr std::size_t kMaxEventTokens = 60;

// Re-joins events using the connectives between the original spans when
// every span is found, in order, inside `source`; comma-joins otherwise.
std::string rejoin_events(std::string_view source,
                          const std::vector<std::string>& original_events,
                          const std::vector<std::string>& final_events);

// Thrown when the backend fails mid-chain; carries the steps completed so
// far.
class RegularizationError : public BackendError {
 public:
  RegularizationError(const std::string& what, RegularizationTrace partial,
                      std::exception_ptr cause)
      : BackendError(what), partial_(std::move(partial)), cause_(std::move(cause)) {}
  const RegularizationTrace& partial() const { return partial_; }
  std::exception_ptr cause() const { return cause_; }

 private:
  RegularizationTrace partial_;
  std::exception_ptr cause_;
};

// Runs spell -> extract -> review as three sequential backend calls.
RegularizationTrace regularize(LlmGateway& gateway, std::string_view text);

// Steps 1-2 only.
std::vector<SoundEvent> extract_events(LlmGateway& gateway, std::string_view text);

struct ManifestRegularization {
  DatasetManifest manifest;
  std::size_t regularized = 0;
  std::size_t unchanged = 0;
  std::size_t degraded_steps = 0;
};

// Appends an origin=regularized caption (parent_index 0) to every clip whose
// index-0 caption changes under regularization. Clips run in parallel.
ManifestRegularization regularize_manifest(LlmGateway& gateway,
                                           const DatasetManifest& manifest);

}  // namespace pppr
