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

#include "pppr/lexicon.hpp"

#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "pppr/text.hpp"

namespace pppr::lexicon {
namespace detail {
extern const char* const kAudioVocab;
}  // namespace detail

namespace {

struct SynonymLine {
  std::string_view word;
  std::vector<std::string> alternatives;
};

// Each word appears in at most one line. Alternatives must be dictionary
// words so paraphrases survive the spell checker untouched.
const std::vector<SynonymLine>& synonym_lines() {
  static const std::vector<SynonymLine> lines = {
      {"multiple", {"several", "many", "numerous"}},
      {"people", {"individuals", "folks", "persons"}},
      {"person", {"individual", "someone"}},
      {"speak", {"talk", "chat", "converse"}},
      {"speaks", {"talks", "chats", "converses"}},
      {"speaking", {"talking", "chatting", "conversing"}},
      {"dog", {"canine", "hound"}},
      {"dogs", {"canines", "hounds"}},
      {"cat", {"feline", "kitty"}},
      {"cats", {"felines", "kitties"}},
      {"bark", {"yap", "woof"}},
      {"barks", {"yaps", "woofs"}},
      {"barking", {"yapping", "woofing"}},
      {"meows", {"mews"}},
      {"meowing", {"mewing"}},
      {"continuously", {"nonstop", "ceaselessly", "persistently", "endlessly"}},
      {"repeatedly", {"again and again", "over and over"}},
      {"loud", {"noisy", "booming"}},
      {"loudly", {"noisily"}},
      {"quiet", {"soft", "hushed"}},
      {"quietly", {"softly"}},
      {"car", {"automobile", "vehicle"}},
      {"cars", {"automobiles", "vehicles"}},
      {"small", {"little", "tiny"}},
      {"large", {"big", "huge"}},
      {"distant", {"faraway", "remote"}},
      {"man", {"gentleman"}},
      {"men", {"gentlemen"}},
      {"woman", {"lady"}},
      {"women", {"ladies"}},
      {"child", {"kid", "youngster"}},
      {"children", {"kids", "youngsters"}},
      {"baby", {"infant", "newborn"}},
      {"babies", {"infants", "newborns"}},
      {"cries", {"wails", "sobs"}},
      {"crying", {"wailing", "sobbing"}},
      {"laughs", {"chuckles", "giggles"}},
      {"laughing", {"chuckling", "giggling"}},
      {"chirp", {"tweet", "twitter"}},
      {"chirps", {"tweets", "twitters"}},
      {"chirping", {"tweeting", "twittering"}},
      {"rain", {"rainfall", "downpour"}},
      {"falls", {"drops", "descends"}},
      {"falling", {"dropping", "descending"}},
      {"wind", {"breeze", "gust"}},
      {"blows", {"gusts", "whooshes"}},
      {"blowing", {"gusting", "whooshing"}},
      {"engine", {"motor"}},
      {"engines", {"motors"}},
      {"shouts", {"yells", "hollers"}},
      {"shouting", {"yelling", "hollering"}},
      {"background", {"backdrop"}},
      {"footsteps", {"footfalls", "steps"}},
      {"slams", {"bangs"}},
      {"slamming", {"banging"}},
      {"rumbles", {"booms", "roars"}},
      {"rumbling", {"booming", "roaring"}},
      {"crowd", {"audience", "throng"}},
      {"quickly", {"rapidly", "swiftly"}},
      {"slowly", {"gradually", "leisurely"}},
      {"sings", {"croons"}},
      {"singing", {"crooning"}},
      {"runs", {"flows", "streams"}},
      {"running", {"flowing", "streaming"}},
      {"passes", {"drives past", "goes by"}},
      {"passing", {"driving past", "going by"}},
      {"heavy", {"intense", "strong"}},
      {"gentle", {"mild", "light"}},
  };
  return lines;
}

// Gate-only aliases: word -> synonym line head.
const std::unordered_map<std::string_view, std::string_view>& gate_aliases() {
  static const std::unordered_map<std::string_view, std::string_view> m = {
      {"conversation", "speak"}, {"conversations", "speak"},
      {"speech", "speak"},       {"speaker", "speak"},
  };
  return m;
}

struct Tables {
  std::unordered_map<std::string, std::size_t> rank;
  std::unordered_set<std::string_view> stopwords;
  std::unordered_map<std::string_view, const SynonymLine*> line_of_head;
  std::unordered_map<std::string, std::string_view> head_of;
};

const Tables& tables() {
  static const Tables t = [] {
    Tables t;
    std::string_view vocab(detail::kAudioVocab);
    std::size_t pos = 0;
    while (pos < vocab.size()) {
      std::size_t eol = vocab.find('\n', pos);
      if (eol == std::string_view::npos) eol = vocab.size();
      std::string w = text::trim(vocab.substr(pos, eol - pos));
      pos = eol + 1;
      if (!w.empty()) t.rank.try_emplace(w, t.rank.size());
    }
    for (std::string_view w :
         {"a", "an", "the", "of", "in", "on", "at", "by", "with", "and", "or",
          "but", "to", "from", "into", "onto", "is", "are", "was", "were", "be",
          "been", "being", "has", "have", "had", "it", "its", "this", "that",
          "these", "those", "there", "here", "as", "some", "very", "too", "also",
          "just", "can", "one", "while", "then", "up", "out", "off", "over",
          "for", "so", "than", "like", "who", "which", "his", "her", "their",
          "they", "he", "she", "them", "we", "you", "i", "heard", "clearly",
          "recording", "sound", "sounds", "hear"}) {
      t.stopwords.insert(w);
    }
    for (const auto& line : synonym_lines()) {
      t.line_of_head.emplace(line.word, &line);
      t.head_of.emplace(std::string(line.word), line.word);
      for (const auto& alt : line.alternatives) t.head_of.emplace(alt, line.word);
    }
    for (const auto& [alias, head] : gate_aliases()) {
      t.head_of.emplace(std::string(alias), head);
    }
    return t;
  }();
  return t;
}

}  // namespace

bool in_dictionary(std::string_view lower_word) {
  return tables().rank.count(std::string(lower_word)) != 0;
}

std::size_t dictionary_rank(std::string_view lower_word) {
  const auto& r = tables().rank;
  auto it = r.find(std::string(lower_word));
  return it == r.end() ? r.size() : it->second;
}

std::size_t dictionary_size() { return tables().rank.size(); }

bool is_stopword(std::string_view lower_word) {
  return tables().stopwords.count(lower_word) != 0;
}

const std::vector<std::string>& synonyms(std::string_view lower_word) {
  static const std::vector<std::string> kNone;
  const auto& m = tables().line_of_head;
  auto it = m.find(lower_word);
  return it == m.end() ? kNone : it->second->alternatives;
}

std::vector<std::string> synonym_heads() {
  std::vector<std::string> out;
  for (const auto& line : synonym_lines()) out.emplace_back(line.word);
  return out;
}

std::string stem(std::string_view w) {
  auto ends = [&](std::string_view suf) {
    return w.size() > suf.size() && w.substr(w.size() - suf.size()) == suf;
  };
  if (ends("ies") && w.size() > 4) return std::string(w.substr(0, w.size() - 3)) + "y";
  if (ends("ing") && w.size() > 5) return std::string(w.substr(0, w.size() - 3));
  if (ends("ed") && w.size() > 4) return std::string(w.substr(0, w.size() - 2));
  if (ends("es") && w.size() > 4 &&
      (ends("shes") || ends("ches") || ends("xes") || ends("zes") || ends("sses"))) {
    return std::string(w.substr(0, w.size() - 2));
  }
  if (ends("s") && !ends("ss") && w.size() > 3) return std::string(w.substr(0, w.size() - 1));
  return std::string(w);
}

std::string canonical(std::string_view lower_word) {
  const auto& head_of = tables().head_of;
  auto it = head_of.find(std::string(lower_word));
  if (it != head_of.end()) return stem(it->second);
  std::string s = stem(lower_word);
  it = head_of.find(s);
  if (it != head_of.end()) return stem(it->second);
  return s;
}

}  // namespace pppr::lexicon
