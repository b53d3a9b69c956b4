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

#include <gtest/gtest.h>

#include "pppr/lexicon.hpp"
#include "pppr/text.hpp"

namespace pppr {
namespace {

TEST(Lexicon, VocabularySizeAndFixtureTokens) {
  EXPECT_GE(lexicon::dictionary_size(), 1500u);
  EXPECT_LE(lexicon::dictionary_size(), 2500u);
  for (const char* w : {"multiple", "people", "speak", "several", "engage", "conversation", "cat",
                        "meowing", "toilet", "flushing", "water", "rushing", "narrow", "channel",
                        "hollow", "gurgling", "refills", "leaves", "rustling", "followed", "small",
                        "bell", "chiming", "birds", "chirp", "background", "duck", "quacks",
                        "continuously"}) {
    EXPECT_TRUE(lexicon::in_dictionary(w)) << w;
  }
  EXPECT_FALSE(lexicon::in_dictionary("cot"));
  EXPECT_FALSE(lexicon::in_dictionary("brids"));
}

TEST(Lexicon, EverySynonymWordIsInTheDictionary) {
  const auto heads = lexicon::synonym_heads();
  ASSERT_FALSE(heads.empty());
  for (const auto& h : heads) {
    for (const auto& alt : lexicon::synonyms(h)) {
      // Alternatives may be phrases ("over and over").
      for (const auto& w : text::words(alt)) {
        EXPECT_TRUE(lexicon::in_dictionary(w)) << h << " -> " << alt;
      }
    }
  }
}

TEST(Lexicon, RankOrdersCommonWordsFirst) {
  EXPECT_LT(lexicon::dictionary_rank("cat"), lexicon::dictionary_rank("cut"));
  EXPECT_EQ(lexicon::dictionary_rank("zzzz"), lexicon::dictionary_size());
}

TEST(Lexicon, StemAndCanonical) {
  EXPECT_EQ(lexicon::stem("barking"), "bark");
  EXPECT_EQ(lexicon::stem("puppies"), "puppy");
  EXPECT_EQ(lexicon::stem("dogs"), "dog");
  EXPECT_EQ(lexicon::stem("glass"), "glass");
  EXPECT_EQ(lexicon::stem("splashes"), "splash");
  EXPECT_EQ(lexicon::canonical("several"), lexicon::canonical("multiple"));
  EXPECT_EQ(lexicon::canonical("conversation"), lexicon::canonical("speak"));
  EXPECT_EQ(lexicon::canonical("hounds"), lexicon::canonical("dogs"));
}

TEST(Lexicon, Stopwords) {
  EXPECT_TRUE(lexicon::is_stopword("the"));
  EXPECT_TRUE(lexicon::is_stopword("sound"));
  EXPECT_FALSE(lexicon::is_stopword("dog"));
}

}  // namespace
}  // namespace pppr
