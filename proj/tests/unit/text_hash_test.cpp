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

#include "pppr/hash.hpp"
#include "pppr/random.hpp"
#include "pppr/text.hpp"

namespace pppr {
namespace {

TEST(Text, TrimAndNormalize) {
  EXPECT_EQ(text::trim("  a b \t\n"), "a b");
  EXPECT_EQ(text::trim(" \t "), "");
  EXPECT_EQ(text::normalize("  A   Dog\tBarks "), "a dog barks");
}

TEST(Text, AlnumTokensSplitOnPunctuation) {
  EXPECT_EQ(text::alnum_tokens("Leaves rustling, followed-by bells!"),
            (std::vector<std::string>{"Leaves", "rustling", "followed", "by", "bells"}));
  EXPECT_TRUE(text::alnum_tokens("  ,;  ").empty());
}

TEST(Text, CaseInsensitiveSearch) {
  EXPECT_EQ(text::find_ci("A Dog Barks", "dog"), 2u);
  EXPECT_EQ(text::find_ci("A Dog Barks", "cat"), std::string::npos);
  EXPECT_TRUE(text::starts_with_ci("CORRECTED: x", "corrected:"));
  EXPECT_EQ(text::join({"a", "b", "c"}, ", "), "a, b, c");
}

TEST(Hash, KnownVectors) {
  EXPECT_EQ(mix64(0), 0xe220a8397b1dcdafULL);  // first SplitMix64 output, seed 0
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Hash, StreamHashSeparatesInputs) {
  const std::uint64_t a[] = {1, 2};
  const std::uint64_t b[] = {2, 1};
  EXPECT_EQ(stream_hash(a, "x"), stream_hash(a, "x"));
  EXPECT_NE(stream_hash(a, "x"), stream_hash(b, "x"));
  EXPECT_NE(stream_hash(a, "x"), stream_hash(a, "y"));
  EXPECT_NE(stream_hash(a), stream_hash(a, "x"));
}

TEST(Random, StreamsAreReproducibleAndDistinct) {
  auto s1 = make_stream(7, 0), s2 = make_stream(7, 0), s3 = make_stream(7, 1);
  const auto x = s1();
  EXPECT_EQ(x, s2());
  EXPECT_NE(x, s3());
}

}  // namespace
}  // namespace pppr
