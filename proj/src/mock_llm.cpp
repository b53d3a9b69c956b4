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

#include "pppr/mock_llm.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <map>
#include <tuple>

#include "pppr/error.hpp"
#include "pppr/hash.hpp"
#include "pppr/lexicon.hpp"
#include "pppr/llm_gateway.hpp"
#include "pppr/prompts.hpp"
#include "pppr/text.hpp"

namespace pppr::mock {
namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

char upper(char c) { return static_cast<char>(std::toupper(static_cast<unsigned char>(c))); }
char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = upper(s[0]);
  return s;
}

// Lowercases the first letter unless the leading word looks like an acronym
// or the pronoun "I".
std::string decapitalize(std::string s) {
  std::size_t end = 0;
  while (end < s.size() && is_alpha(s[end])) ++end;
  const bool acronym = end > 1 && std::all_of(s.begin(), s.begin() + end, is_upper);
  const bool pronoun = end == 1 && s[0] == 'I';
  if (!s.empty() && !acronym && !pronoun) s[0] = lower(s[0]);
  return s;
}

// Carries the case pattern of `like` onto `word`.
std::string match_case(std::string_view like, std::string word) {
  if (like.size() > 1 && std::all_of(like.begin(), like.end(), is_upper)) {
    std::transform(word.begin(), word.end(), word.begin(), upper);
  } else if (!like.empty() && is_upper(like[0])) {
    word = capitalize(std::move(word));
  }
  return word;
}

// Applies fn to every maximal run of ASCII letters and rebuilds the string.
template <typename Fn>
std::string map_words(std::string_view s, Fn&& fn) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (!is_alpha(s[i])) {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && is_alpha(s[j])) ++j;
    const bool glued_to_digit =
        (i > 0 && is_digit(s[i - 1])) || (j < s.size() && is_digit(s[j]));
    std::string_view word = s.substr(i, j - i);
    out += glued_to_digit ? std::string(word) : fn(word);
    i = j;
  }
  return out;
}

struct FixtureKey {
  std::string_view text;
  int variant;
  auto operator<=>(const FixtureKey&) const = default;
};

const std::map<FixtureKey, std::string_view>& paraphrase_fixtures() {
  static const std::map<FixtureKey, std::string_view> m = {
      {{"multiple people speak", 1}, "Several people engage in conversation"},
  };
  return m;
}

const std::map<std::string_view, std::string_view>& spelling_fixtures() {
  static const std::map<std::string_view, std::string_view> m = {
      {"cot", "cat"},
  };
  return m;
}

const std::map<std::string_view, std::string_view>& supplement_fixtures() {
  static const std::map<std::string_view, std::string_view> m = {
      {"a toilet flushing",
       "a toilet flushing like the sound of water rushing down a narrow "
       "channel, followed by a hollow gurgling as it refills"},
      {"toilet flushing",
       "toilet flushing like the sound of water rushing down a narrow "
       "channel, followed by a hollow gurgling as it refills"},
      {"thunder", "thunder rumbling loudly in the distance"},
      {"an engine idling", "an engine idling with a low steady rumble"},
  };
  return m;
}

std::string strip_terminal(std::string_view s, std::string* tail = nullptr) {
  std::size_t e = s.size();
  while (e > 0 && (s[e - 1] == '.' || s[e - 1] == '!' || s[e - 1] == ',' ||
                   s[e - 1] == ';')) {
    --e;
  }
  if (tail) *tail = std::string(s.substr(e));
  return std::string(s.substr(0, e));
}

std::string best_correction(const std::string& lw) {
  if (auto it = spelling_fixtures().find(lw); it != spelling_fixtures().end()) {
    return std::string(it->second);
  }
  // Rank: same first letter, then same length, then dictionary priority.
  using Key = std::tuple<int, int, std::size_t>;
  Key best{2, 2, std::numeric_limits<std::size_t>::max()};
  std::string best_word;
  auto consider = [&](const std::string& cand) {
    if (cand.empty() || !lexicon::in_dictionary(cand)) return;
    Key k{cand[0] == lw[0] ? 0 : 1, cand.size() == lw.size() ? 0 : 1,
          lexicon::dictionary_rank(cand)};
    if (k < best) {
      best = k;
      best_word = cand;
    }
  };
  for (std::size_t i = 0; i < lw.size(); ++i) {
    consider(lw.substr(0, i) + lw.substr(i + 1));
  }
  for (std::size_t i = 0; i + 1 < lw.size(); ++i) {
    std::string t = lw;
    std::swap(t[i], t[i + 1]);
    if (t != lw) consider(t);
  }
  for (std::size_t i = 0; i < lw.size(); ++i) {
    for (char c = 'a'; c <= 'z'; ++c) {
      if (c == lw[i]) continue;
      std::string t = lw;
      t[i] = c;
      consider(t);
    }
  }
  for (std::size_t i = 0; i <= lw.size(); ++i) {
    for (char c = 'a'; c <= 'z'; ++c) {
      consider(lw.substr(0, i) + c + lw.substr(i));
    }
  }
  return best_word;
}

// Connectives in match priority order; all are word-bounded by construction.
constexpr std::string_view kConnectives[] = {
    ", followed by ", ", and then ", " and then ", " followed by ",
    ", then ",        " then ",      ", while ",    " while ",
    ", as ",          " as ",        " before ",    " after ",
    " during ",       " when ",      ", and ",      " and ",
    "; ",             ", ",
};

std::pair<int, int> variant_from_tag(const std::optional<std::string>& tag) {
  if (!tag) return {1, 0};
  int rewrite = 0, attempt = 0;
  const char* b = tag->data();
  const char* e = b + tag->size();
  auto [p, ec] = std::from_chars(b, e, rewrite);
  bool ok = ec == std::errc() && rewrite >= 1;
  if (ok && p != e) {
    ok = *p == '.';
    if (ok) {
      auto [p2, ec2] = std::from_chars(p + 1, e, attempt);
      ok = ec2 == std::errc() && p2 == e && attempt >= 0;
    }
  }
  if (!ok) return {1 + static_cast<int>(fnv1a64(*tag) % 4), 0};
  return {(rewrite - 1) % 4 + 1, attempt + (rewrite - 1) / 4};
}

std::vector<std::string> bullet_lines(std::string_view payload) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= payload.size()) {
    std::size_t eol = payload.find('\n', pos);
    if (eol == std::string_view::npos) eol = payload.size();
    std::string line = text::trim(payload.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.rfind("- ", 0) == 0) line = text::trim(line.substr(2));
    if (!line.empty()) out.push_back(std::move(line));
  }
  return out;
}

std::string events_block(const std::vector<std::string>& events) {
  std::string out(prompts::kEventsTag);
  for (const auto& e : events) out += "\n- " + e;
  return out;
}

}  // namespace

std::string paraphrase(std::string_view input, int variant, int shift) {
  require(variant >= 1 && variant <= 4, "paraphrase variant must be in [1,4]");
  require(shift >= 0, "paraphrase shift must be non-negative");
  std::string tail;
  const std::string body = strip_terminal(text::trim(input), &tail);
  require(!body.empty(), "paraphrase input is empty");

  if (shift == 0) {
    const std::string key = text::normalize(body);
    auto it = paraphrase_fixtures().find(FixtureKey{key, variant});
    if (it != paraphrase_fixtures().end()) return std::string(it->second) + tail;
  }

  bool changed = false;
  std::string sub = map_words(body, [&](std::string_view w) {
    const auto& alts = lexicon::synonyms(text::to_lower(w));
    if (alts.empty()) return std::string(w);
    changed = true;
    const auto pick = static_cast<std::size_t>(variant - 1 + shift) % alts.size();
    return match_case(w, alts[pick]);
  });

  std::string out;
  switch (variant) {
    case 1:
      out = changed ? capitalize(sub) : capitalize(sub) + " in this clip";
      break;
    case 2:
      out = "The sound of " + decapitalize(sub);
      break;
    case 3:
      out = capitalize(sub) + " in the recording";
      break;
    default:
      out = "One can hear " + decapitalize(sub);
      break;
  }
  return out + tail;
}

std::pair<std::string, std::vector<SpellFix>> spell_correct(std::string_view input) {
  std::vector<SpellFix> fixes;
  std::string out = map_words(input, [&](std::string_view w) {
    if (w.size() < 3) return std::string(w);
    const std::string lw = text::to_lower(w);
    if (lexicon::in_dictionary(lw)) return std::string(w);
    std::string fix = best_correction(lw);
    if (fix.empty()) return std::string(w);
    std::string cased = match_case(w, fix);
    fixes.push_back({std::string(w), cased});
    return cased;
  });
  return {std::move(out), std::move(fixes)};
}

std::vector<std::string> extract_events(std::string_view input) {
  std::vector<std::string> events;
  std::size_t start = 0, i = 0;
  auto flush = [&](std::size_t end) {
    std::string piece = text::trim(input.substr(start, end - start));
    if (!piece.empty()) events.push_back(std::move(piece));
  };
  while (i < input.size()) {
    std::size_t matched = 0;
    for (std::string_view c : kConnectives) {
      if (text::starts_with_ci(input.substr(i), c)) {
        matched = c.size();
        break;
      }
    }
    if (matched) {
      flush(i);
      i += matched;
      start = i;
    } else {
      ++i;
    }
  }
  flush(input.size());
  return events;
}

std::string supplement(std::string_view event) {
  std::string tail;
  const std::string body = strip_terminal(text::trim(event), &tail);
  auto it = supplement_fixtures().find(text::normalize(body));
  if (it == supplement_fixtures().end()) return std::string(event);
  return match_case(body.substr(0, 1), std::string(it->second)) + tail;
}

}  // namespace pppr::mock

namespace pppr {

std::string MockBackend::complete(const PromptRequest& req) {
  const std::string& u = req.user_text;
  if (u.rfind(prompts::kRewrite, 0) == 0) {
    std::size_t sep = u.find("\n\n");
    std::string caption = sep == std::string::npos ? "" : text::trim(u.substr(sep + 2));
    if (caption.empty()) throw BackendError("mock: rewrite prompt carries no caption");
    auto [variant, shift] = mock::variant_from_tag(req.variant_tag);
    return mock::paraphrase(caption, variant, shift);
  }

  std::size_t step_at = u.find(prompts::kStepMarker);
  std::size_t input_at = u.rfind(prompts::kInputMarker);
  if (step_at != std::string::npos && input_at != std::string::npos) {
    const char step = u[step_at + prompts::kStepMarker.size()];
    const std::string payload = u.substr(input_at + prompts::kInputMarker.size());
    switch (step) {
      case '1': {
        auto [fixed, fixes] = mock::spell_correct(text::trim(payload));
        std::string out = std::string(prompts::kCorrectedTag) + " " + fixed;
        if (!fixes.empty()) {
          out += "\n" + std::string(prompts::kFixesTag) + " ";
          for (std::size_t i = 0; i < fixes.size(); ++i) {
            if (i) out += "; ";
            out += fixes[i].misspelled + "->" + fixes[i].corrected;
          }
        }
        return out;
      }
      case '2':
        return mock::events_block(mock::extract_events(text::trim(payload)));
      case '3': {
        std::vector<std::string> events = mock::bullet_lines(payload);
        for (auto& e : events) e = mock::supplement(e);
        return mock::events_block(events);
      }
      default:
        break;
    }
  }
  return text::trim(u);
}

}  // namespace pppr
