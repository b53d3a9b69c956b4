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

#include "pppr/regularizer.hpp"

#include <unordered_set>

#include "pppr/prompts.hpp"
#include "pppr/text.hpp"

namespace pppr {

std::string_view to_string(CotStep s) {
  switch (s) {
    case CotStep::kSpell: return "spell";
    case CotStep::kExtract: return "extract";
    case CotStep::kReview: return "review";
  }
  return "spell";
}

namespace {

int step_number(CotStep s) { return static_cast<int>(s) + 1; }

std::vector<std::string> lines_of(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t eol = s.find('\n', pos);
    if (eol == std::string_view::npos) eol = s.size();
    std::string_view line = s.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.emplace_back(line);
    pos = eol + 1;
  }
  return out;
}

std::string after_tag(const std::string& line, std::string_view tag) {
  return text::trim(std::string_view(line).substr(tag.size()));
}

std::string truncate_words(const std::string& s, std::size_t max_words) {
  auto w = text::words(s);
  if (w.size() <= max_words) return s;
  w.resize(max_words);
  return text::join(w, " ");
}

bool parse_spell(const std::vector<std::string>& lines, SpellPayload& out,
                 std::size_t& anomalies) {
  bool have_text = false, have_fixes = false;
  for (const auto& raw : lines) {
    const std::string line = text::trim(raw);
    if (text::starts_with_ci(line, prompts::kCorrectedTag)) {
      std::string value = after_tag(line, prompts::kCorrectedTag);
      if (have_text || value.empty()) {
        ++anomalies;
        continue;
      }
      out.text = std::move(value);
      have_text = true;
    } else if (text::starts_with_ci(line, prompts::kFixesTag)) {
      if (have_fixes) {
        ++anomalies;
        continue;
      }
      have_fixes = true;
      std::string list = after_tag(line, prompts::kFixesTag);
      std::size_t pos = 0;
      while (pos <= list.size()) {
        std::size_t semi = list.find(';', pos);
        if (semi == std::string::npos) semi = list.size();
        std::string pair = text::trim(std::string_view(list).substr(pos, semi - pos));
        pos = semi + 1;
        if (pair.empty()) continue;
        std::size_t arrow = pair.find("->");
        if (arrow == std::string::npos) {
          ++anomalies;
          continue;
        }
        mock::SpellFix fix{text::trim(pair.substr(0, arrow)),
                           text::trim(pair.substr(arrow + 2))};
        if (fix.misspelled.empty() || fix.corrected.empty()) {
          ++anomalies;
          continue;
        }
        out.fixes.push_back(std::move(fix));
      }
    }
  }
  return have_text;
}

bool parse_events(const std::vector<std::string>& lines, EventsPayload& out,
                  std::size_t& anomalies) {
  std::vector<std::vector<std::string>> blocks;
  bool open = false;
  for (const auto& raw : lines) {
    const std::string line = text::trim(raw);
    if (text::starts_with_ci(line, prompts::kEventsTag) &&
        text::trim(std::string_view(line).substr(prompts::kEventsTag.size())).empty()) {
      blocks.emplace_back();
      open = true;
      continue;
    }
    if (!open) continue;
    if (line.empty()) continue;
    if (line[0] == '-') {
      std::string item = text::trim(std::string_view(line).substr(1));
      if (!item.empty()) blocks.back().push_back(std::move(item));
      continue;
    }
    open = false;
  }
  if (blocks.size() > 1) anomalies += blocks.size() - 1;
  for (auto& b : blocks) {
    if (!b.empty()) {
      out.events = std::move(b);
      return true;
    }
  }
  return false;
}

std::string bullet_list(const std::vector<std::string>& events) {
  std::string s;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (i) s += '\n';
    s += "- " + events[i];
  }
  return s;
}

}  // namespace

PromptRequest build_cot_prompt(CotStep step, std::string_view payload) {
  require(!text::trim(payload).empty(), "CoT payload is empty");
  std::string u(prompts::kCotHeader);
  u += "\n\n";
  u += prompts::kStepMarker;
  u += std::to_string(step_number(step));
  u += " (";
  u += to_string(step);
  u += ")\nAnswer only the current step, using exactly this format:\n";
  switch (step) {
    case CotStep::kSpell:
      u += "CORRECTED: <the input text with spelling errors corrected>\n"
           "FIXES: <misspelled>-><corrected>; ... (omit this line when nothing "
           "was corrected)\n";
      break;
    case CotStep::kExtract:
      u += "EVENTS:\n- <sound event>\n(one line per sound event, in the order "
           "the events appear in the text, each copied verbatim)\n";
      break;
    case CotStep::kReview:
      u += "EVENTS:\n- <reviewed sound event>\n(one line per input event, same "
           "order and count; supplement incomplete descriptions)\n";
      break;
  }
  u += "\n";
  u += prompts::kInputMarker;
  u += text::trim(payload);

  PromptRequest req;
  req.user_text = std::move(u);
  req.temperature = 0.0;
  req.max_tokens = 512;
  return req;
}

StepResult parse_step_output(std::string_view raw, CotStep step,
                             const StepPayload& fallback) {
  StepResult r;
  r.step = step;
  r.raw_output = std::string(raw);
  const auto lines = lines_of(raw);
  if (step == CotStep::kSpell) {
    SpellPayload p;
    r.ok = parse_spell(lines, p, r.anomalies);
    if (r.ok) r.parsed = std::move(p);
  } else {
    EventsPayload p;
    r.ok = parse_events(lines, p, r.anomalies);
    if (r.ok && step == CotStep::kReview) {
      for (auto& e : p.events) e = truncate_words(e, kMaxEventTokens);
    }
    if (r.ok) r.parsed = std::move(p);
  }
  if (!r.ok) r.parsed = fallback;
  return r;
}

std::string rejoin_events(std::string_view source,
                          const std::vector<std::string>& original_events,
                          const std::vector<std::string>& final_events) {
  if (original_events.size() == final_events.size() && !original_events.empty()) {
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::size_t cursor = 0;
    bool found = true;
    for (const auto& e : original_events) {
      std::size_t at = text::find_ci(source, e, cursor);
      if (at == std::string_view::npos || e.empty()) {
        found = false;
        break;
      }
      spans.emplace_back(at, at + e.size());
      cursor = at + e.size();
    }
    if (found) {
      std::string out(source.substr(0, spans.front().first));
      for (std::size_t i = 0; i < spans.size(); ++i) {
        out += final_events[i];
        const std::size_t next =
            i + 1 < spans.size() ? spans[i + 1].first : source.size();
        out += source.substr(spans[i].second, next - spans[i].second);
      }
      return out;
    }
  }
  return text::join(final_events, ", ");
}

namespace {

struct ChainResult {
  RegularizationTrace trace;
  std::string corrected;
  std::vector<std::string> events;
};

ChainResult run_chain(LlmGateway& gateway, std::string_view input, bool full) {
  require(!text::trim(input).empty(), "text to regularize is empty");
  ChainResult c;
  c.trace.input_text = std::string(input);

  auto call = [&](CotStep step, std::string_view payload, const StepPayload& fallback) {
    std::string raw;
    try {
      raw = gateway.complete(build_cot_prompt(step, payload)).text;
    } catch (const BackendError& e) {
      throw RegularizationError(std::string("regularization step '") +
                                    std::string(to_string(step)) + "' failed: " + e.what(),
                                c.trace, std::current_exception());
    }
    c.trace.steps.push_back(parse_step_output(raw, step, fallback));
    return c.trace.steps.back();
  };

  const StepResult s1 = call(CotStep::kSpell, input, SpellPayload{std::string(input), {}});
  c.corrected = std::get<SpellPayload>(s1.parsed).text;

  const StepResult s2 = call(CotStep::kExtract, c.corrected, EventsPayload{{c.corrected}});
  c.events = std::get<EventsPayload>(s2.parsed).events;
  if (!full) return c;

  const EventsPayload step2_payload{c.events};
  call(CotStep::kReview, bullet_list(c.events), step2_payload);
  StepResult& s3 = c.trace.steps.back();
  if (s3.ok && std::get<EventsPayload>(s3.parsed).events.size() != c.events.size()) {
    // Review must keep the event count.
    s3.ok = false;
    ++s3.anomalies;
    s3.parsed = step2_payload;
  }
  const auto& final_events = std::get<EventsPayload>(s3.parsed).events;
  std::string out = rejoin_events(c.corrected, c.events, final_events);
  c.trace.output_text = text::trim(out).empty() ? std::string(input) : std::move(out);
  return c;
}

}  // namespace

RegularizationTrace regularize(LlmGateway& gateway, std::string_view text) {
  return run_chain(gateway, text, true).trace;
}

std::vector<SoundEvent> extract_events(LlmGateway& gateway, std::string_view text) {
  ChainResult c = run_chain(gateway, text, false);
  std::vector<SoundEvent> out;
  for (std::size_t i = 0; i < c.events.size(); ++i) out.push_back({c.events[i], i});
  return out;
}

ManifestRegularization regularize_manifest(LlmGateway& gateway,
                                           const DatasetManifest& manifest) {
  const std::size_t n = manifest.entries.size();
  std::vector<RegularizationTrace> traces(n);
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const auto& entry = manifest.entries[idx];
    if (entry.captions.empty()) continue;
    try {
      traces[idx] = regularize(gateway, entry.captions.front().text);
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ManifestRegularization out{manifest, 0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    ClipEntry& entry = out.manifest.entries[i];
    if (entry.captions.empty()) continue;
    for (const auto& s : traces[i].steps) out.degraded_steps += s.ok ? 0 : 1;
    const std::string norm = text::normalize(traces[i].output_text);
    bool duplicate = false;
    for (const auto& c : entry.captions) duplicate |= text::normalize(c.text) == norm;
    if (duplicate) {
      ++out.unchanged;
      continue;
    }
    CaptionRecord rec;
    rec.clip_id = entry.clip_id;
    rec.text = traces[i].output_text;
    rec.origin = Origin::kRegularized;
    rec.parent_index = 0;
    entry.captions.push_back(std::move(rec));
    ++out.regularized;
  }
  return out;
}

nlohmann::ordered_json to_json(const RegularizationTrace& trace) {
  nlohmann::ordered_json j;
  j["input_text"] = trace.input_text;
  j["steps"] = nlohmann::ordered_json::array();
  for (const auto& s : trace.steps) {
    nlohmann::ordered_json js;
    js["step"] = std::string(to_string(s.step));
    js["ok"] = s.ok;
    js["anomalies"] = s.anomalies;
    js["raw_output"] = s.raw_output;
    if (const auto* sp = std::get_if<SpellPayload>(&s.parsed)) {
      js["parsed"]["text"] = sp->text;
      js["parsed"]["fixes"] = nlohmann::ordered_json::array();
      for (const auto& f : sp->fixes) {
        js["parsed"]["fixes"].push_back({{"from", f.misspelled}, {"to", f.corrected}});
      }
    } else {
      js["parsed"]["events"] = std::get<EventsPayload>(s.parsed).events;
    }
    j["steps"].push_back(std::move(js));
  }
  j["output_text"] = trace.output_text;
  return j;
}

}  // namespace pppr
