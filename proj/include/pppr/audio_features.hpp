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

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pppr/kernels.hpp"

namespace pppr {

// Interleaved samples in [-1, 1].
struct AudioSignal {
  std::vector<double> samples;
  int sample_rate = 16000;
  int channels = 1;

  std::size_t frames() const {
    return channels > 0 ? samples.size() / static_cast<std::size_t>(channels) : 0;
  }
};

// Window is periodic Hann and the mel scale is HTK; neither is configurable.
struct FeatureParams {
  int sample_rate = 16000;
  double clip_seconds = 10.24;
  int n_mels = 64;
  int win_length = 1024;
  int n_fft = 1024;
  int hop = 160;
  double fmin = 0.0;
  double fmax = 8000.0;
  double log_floor = 1e-5;

  std::size_t clip_samples() const;
  // Frames kept: the centered STFT yields clip_samples/hop + 1 and the last
  // one is dropped.
  std::size_t n_frames() const;
};

void validate(const FeatureParams& p);
nlohmann::ordered_json to_json(const FeatureParams& p);
// Missing keys keep their defaults; unknown keys are a ConfigError.
FeatureParams feature_params_from_json(const nlohmann::json& j);

struct MelSpectrogram {
  std::size_t n_mels = 0;
  std::size_t n_frames = 0;
  // n_mels x n_frames, row-major, natural-log amplitude.
  std::vector<double> values;
  FeatureParams params;

  double at(std::size_t mel, std::size_t frame) const {
    return values[mel * n_frames + frame];
  }
};

enum class WavEncoding { kPcm16, kPcm24, kPcm32, kFloat32 };

// PCM 16/24/32-bit and IEEE float 32-bit, plain or WAVE_FORMAT_EXTENSIBLE.
AudioSignal decode_wav(std::string_view bytes);
AudioSignal read_wav(const std::filesystem::path& path);
std::string encode_wav(const AudioSignal& sig, WavEncoding enc);
void write_wav(const std::filesystem::path& path, const AudioSignal& sig, WavEncoding enc);

// Channel average.
AudioSignal to_mono(const AudioSignal& sig);

// Averages channels, then resamples to target_rate with a band-limited
// windowed-sinc filter. Input rates outside [8000, 192000] are a ConfigError.
AudioSignal resample_mono(const AudioSignal& sig, int target_rate = 16000);

// Zero-pads or truncates at the tail.
AudioSignal pad_or_trim(const AudioSignal& sig, std::size_t length);
AudioSignal pad_or_trim(const AudioSignal& sig, const FeatureParams& p = {});

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// n_mels x (n_fft/2 + 1) triangular filters, unnormalized.
std::vector<double> mel_filterbank(const FeatureParams& p);
// Peak frequency (Hz) of each filter.
std::vector<double> mel_center_frequencies(const FeatureParams& p);

kernels::MelPlan make_mel_plan(const FeatureParams& p);

// Expects a mono signal at p.sample_rate with exactly p.clip_samples()
// samples. Throws DataError on non-finite samples.
MelSpectrogram mel_spectrogram(const AudioSignal& sig, const FeatureParams& p = {});
MelSpectrogram mel_spectrogram_serial(const AudioSignal& sig, const FeatureParams& p = {});

// resample_mono -> pad_or_trim -> mel_spectrogram.
MelSpectrogram featurize(const AudioSignal& raw, const FeatureParams& p = {});

// 16-byte header ("PPPRMEL1", u32 n_mels, u32 n_frames), then little-endian
// f32 values row-major.
std::string encode_melbin(const MelSpectrogram& m);
MelSpectrogram decode_melbin(std::string_view bytes);
void save_melbin(const std::filesystem::path& path, const MelSpectrogram& m);
MelSpectrogram load_melbin(const std::filesystem::path& path);

}  // namespace pppr
