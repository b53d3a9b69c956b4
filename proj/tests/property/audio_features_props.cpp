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

#include <cmath>
#include <numbers>
#include <random>

#include "pppr/audio_features.hpp"

namespace pppr {
namespace {

FeatureParams short_params() {
  FeatureParams p;
  p.clip_seconds = 0.32;
  return p;
}

AudioSignal random_signal(std::mt19937_64& rng, std::size_t n, double amp) {
  std::uniform_real_distribution<double> u(-amp, amp);
  AudioSignal s;
  s.samples.resize(n);
  for (auto& x : s.samples) x = u(rng);
  return s;
}

TEST(AudioProps, GainIsMonotoneInEveryCell) {
  const auto p = short_params();
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    AudioSignal s = random_signal(rng, p.clip_samples(), 0.4);
    AudioSignal louder = s;
    for (auto& x : louder.samples) x *= 2.0;
    const auto a = mel_spectrogram(s, p);
    const auto b = mel_spectrogram(louder, p);
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      ASSERT_GE(b.values[i], a.values[i] - 1e-12) << trial << " @" << i;
      // Above the floor, doubling adds exactly ln 2.
      if (a.values[i] > std::log(1e-5) + 1.0) {
        ASSERT_NEAR(b.values[i] - a.values[i], std::log(2.0), 1e-9);
      }
    }
  }
}

TEST(AudioProps, ValuesBoundedBelowByFloor) {
  const auto p = short_params();
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = mel_spectrogram(random_signal(rng, p.clip_samples(), 1e-3 * (trial + 1)), p);
    for (double v : m.values) ASSERT_GE(v, std::log(1e-5));
  }
}

TEST(AudioProps, WavPcm16RoundTripWithinQuantization) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    AudioSignal s = random_signal(rng, 257, 1.0);
    s.channels = 1 + trial % 3;
    s.samples.resize(s.samples.size() / s.channels * s.channels);
    const AudioSignal d = decode_wav(encode_wav(s, WavEncoding::kPcm16));
    ASSERT_EQ(d.samples.size(), s.samples.size());
    for (std::size_t i = 0; i < s.samples.size(); ++i) {
      ASSERT_NEAR(d.samples[i], s.samples[i], 1.0 / 32767.0);
    }
  }
}

TEST(AudioProps, MelbinRoundTripPreservesF32) {
  std::mt19937_64 rng(24);
  std::normal_distribution<double> n(0, 5);
  for (int trial = 0; trial < 20; ++trial) {
    MelSpectrogram m;
    m.n_mels = 1 + trial;
    m.n_frames = 3 + 2 * trial;
    for (std::size_t i = 0; i < m.n_mels * m.n_frames; ++i) m.values.push_back(n(rng));
    const auto back = decode_melbin(encode_melbin(m));
    ASSERT_EQ(back.values.size(), m.values.size());
    for (std::size_t i = 0; i < m.values.size(); ++i) {
      ASSERT_EQ(static_cast<float>(back.values[i]), static_cast<float>(m.values[i]));
    }
  }
}

}  // namespace
}  // namespace pppr
