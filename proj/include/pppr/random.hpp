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

#include <cstdint>
#include <random>

#include "pppr/hash.hpp"

namespace pppr {

// Independent random stream for (seed, index). Lets parallel loops draw
// per-item randomness without depending on iteration order.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t words[] = {seed, index};
  return std::mt19937_64(stream_hash(words));
}

}  // namespace pppr
