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

#include "pppr/audio_features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>

#include "binary_io.hpp"
#include "pppr/error.hpp"

namespace pppr {

std::size_t FeatureParams::clip_samples() const {
  return static_cast<std::size_t>(std::llround(sample_rate * clip_seconds));
}

std::size_t FeatureParams::n_frames() const { return clip_samples() / static_cast<std::size_t>(hop); }

void validate(const FeatureParams& p) {
  if (p.sample_rate <= 0) throw ConfigError("sample_rate must be positive");
  if (!(p.clip_seconds > 0.0)) throw ConfigError("clip_seconds must be positive");
  if (p.n_mels < 1) throw ConfigError("n_mels must be positive");
  if (p.win_length < 1 || p.n_fft < p.win_length) {
    throw ConfigError("need 1 <= win_length <= n_fft");
  }
  if (p.hop < 1) throw ConfigError("hop must be positive");
  if (p.clip_samples() % static_cast<std::size_t>(p.hop) != 0) {
    throw ConfigError("hop must divide the clip length in samples");
  }
  if (p.clip_samples() <= static_cast<std::size_t>(p.n_fft / 2)) {
    throw ConfigError("clip is too short for reflect padding");
  }
  if (!(p.fmin >= 0.0 && p.fmin < p.fmax && p.fmax <= p.sample_rate / 2.0)) {
    throw ConfigError("need 0 <= fmin < fmax <= sample_rate/2");
  }
  if (!(p.log_floor > 0.0)) throw ConfigError("log_floor must be positive");
}

nlohmann::ordered_json to_json(const FeatureParams& p) {
  nlohmann::ordered_json j;
  j["sample_rate"] = p.sample_rate;
  j["clip_seconds"] = p.clip_seconds;
  j["n_mels"] = p.n_mels;
  j["win_length"] = p.win_length;
  j["n_fft"] = p.n_fft;
  j["hop"] = p.hop;
  j["window"] = "hann";
  j["mel_scale"] = "htk";
  j["fmin"] = p.fmin;
  j["fmax"] = p.fmax;
  j["log_floor"] = p.log_floor;
  return j;
}

FeatureParams feature_params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("feature params must be a JSON object");
  FeatureParams p;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "sample_rate") p.sample_rate = value.get<int>();
      else if (key == "clip_seconds") p.clip_seconds = value.get<double>();
      else if (key == "n_mels") p.n_mels = value.get<int>();
      else if (key == "win_length") p.win_length = value.get<int>();
      else if (key == "n_fft") p.n_fft = value.get<int>();
      else if (key == "hop") p.hop = value.get<int>();
      else if (key == "fmin") p.fmin = value.get<double>();
      else if (key == "fmax") p.fmax = value.get<double>();
      else if (key == "log_floor") p.log_floor = value.get<double>();
      else if (key == "window") {
        if (value != "hann") throw ConfigError("only the hann window is supported");
      } else if (key == "mel_scale") {
        if (value != "htk") throw ConfigError("only the htk mel scale is supported");
      } else {
        throw ConfigError("unknown feature parameter '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad feature params: ") + e.what());
  }
  validate(p);
  return p;
}

// ---------------------------------------------------------------------------
// WAV

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

double read_sample(binio::Reader& r, std::uint16_t format, std::uint16_t bits) {
  if (format == kFormatFloat) {
    if (bits == 32) return static_cast<double>(r.get<float>());
    if (bits == 64) return r.get<double>();
  } else {
    switch (bits) {
      case 16: return r.get<std::int16_t>() / 32768.0;
      case 24: {
        auto b = r.take(3);
        std::int32_t v = static_cast<std::uint8_t>(b[0]) |
                         (static_cast<std::uint8_t>(b[1]) << 8) |
                         (static_cast<std::int8_t>(b[2]) * 65536);
        return v / 8388608.0;
      }
      case 32: return r.get<std::int32_t>() / 2147483648.0;
      default: break;
    }
  }
  throw FormatError("unsupported WAV sample format (format " + std::to_string(format) +
                    ", " + std::to_string(bits) + " bits)");
}

}  // namespace

AudioSignal decode_wav(std::string_view bytes) {
  binio::Reader r(bytes, "WAV");
  if (r.take(4) != "RIFF") throw FormatError("WAV: missing RIFF header");
  r.get<std::uint32_t>();
  if (r.take(4) != "WAVE") throw FormatError("WAV: missing WAVE tag");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  while (r.remaining() >= 8) {
    const std::string_view id = r.take(4);
    const std::uint32_t size = r.get<std::uint32_t>();
    if (id == "fmt ") {
      binio::Reader f(r.take(size), "WAV fmt chunk");
      format = f.get<std::uint16_t>();
      channels = f.get<std::uint16_t>();
      rate = f.get<std::uint32_t>();
      f.get<std::uint32_t>();
      f.get<std::uint16_t>();
      bits = f.get<std::uint16_t>();
      if (format == kFormatExtensible) {
        if (f.remaining() < 24) throw FormatError("WAV: short extensible fmt chunk");
        f.skip(8);
        format = f.get<std::uint16_t>();
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw FormatError("WAV: data chunk before fmt chunk");
      if (format != kFormatPcm && format != kFormatFloat) {
        throw FormatError("WAV: unsupported format code " + std::to_string(format));
      }
      if (channels == 0 || rate == 0 || bits % 8 != 0 || bits == 0) {
        throw FormatError("WAV: invalid fmt fields");
      }
      const std::size_t frame_bytes = static_cast<std::size_t>(channels) * (bits / 8);
      const std::size_t usable = std::min<std::size_t>(size, r.remaining());
      binio::Reader d(r.take(usable - usable % frame_bytes), "WAV data chunk");
      AudioSignal sig;
      sig.sample_rate = static_cast<int>(rate);
      sig.channels = channels;
      sig.samples.reserve(usable / (bits / 8));
      while (d.remaining() > 0) sig.samples.push_back(read_sample(d, format, bits));
      return sig;
    } else {
      r.skip(std::min<std::size_t>(size, r.remaining()));
    }
    if (size % 2 == 1 && r.remaining() > 0) r.skip(1);
  }
  throw FormatError("WAV: no data chunk");
}

AudioSignal read_wav(const std::filesystem::path& path) {
  try {
    return decode_wav(binio::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string encode_wav(const AudioSignal& sig, WavEncoding enc) {
  require(sig.channels > 0 && sig.sample_rate > 0, "invalid signal layout");
  const std::uint16_t bits = enc == WavEncoding::kPcm16 ? 16 : enc == WavEncoding::kPcm24 ? 24 : 32;
  const std::uint16_t format = enc == WavEncoding::kFloat32 ? kFormatFloat : kFormatPcm;
  const auto channels = static_cast<std::uint16_t>(sig.channels);
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(sig.samples.size() * (bits / 8));

  std::string out = "RIFF";
  binio::put<std::uint32_t>(out, 36 + data_bytes);
  out += "WAVEfmt ";
  binio::put<std::uint32_t>(out, 16);
  binio::put<std::uint16_t>(out, format);
  binio::put<std::uint16_t>(out, channels);
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(sig.sample_rate));
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(sig.sample_rate) * channels * (bits / 8));
  binio::put<std::uint16_t>(out, static_cast<std::uint16_t>(channels * (bits / 8)));
  binio::put<std::uint16_t>(out, bits);
  out += "data";
  binio::put<std::uint32_t>(out, data_bytes);
  for (double x : sig.samples) {
    switch (enc) {
      case WavEncoding::kFloat32: binio::put<float>(out, static_cast<float>(x)); break;
      case WavEncoding::kPcm16:
        binio::put<std::int16_t>(out, static_cast<std::int16_t>(
                                          std::clamp(std::lround(x * 32768.0), -32768L, 32767L)));
        break;
      case WavEncoding::kPcm24: {
        const auto v = static_cast<std::int32_t>(
            std::clamp(std::lround(x * 8388608.0), -8388608L, 8388607L));
        out.push_back(static_cast<char>(v & 0xff));
        out.push_back(static_cast<char>((v >> 8) & 0xff));
        out.push_back(static_cast<char>((v >> 16) & 0xff));
        break;
      }
      case WavEncoding::kPcm32:
        binio::put<std::int32_t>(out, static_cast<std::int32_t>(std::clamp(
                                          std::llround(x * 2147483648.0), -2147483648LL, 2147483647LL)));
        break;
    }
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const AudioSignal& sig, WavEncoding enc) {
  binio::write_file(path, encode_wav(sig, enc));
}

// ---------------------------------------------------------------------------
// Resampling and length

AudioSignal to_mono(const AudioSignal& sig) {
  require(sig.channels > 0, "signal has no channels");
  if (sig.channels == 1) return sig;
  AudioSignal out;
  out.sample_rate = sig.sample_rate;
  out.channels = 1;
  const std::size_t frames = sig.frames();
  out.samples.resize(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    double s = 0.0;
    for (int c = 0; c < sig.channels; ++c) s += sig.samples[f * sig.channels + c];
    out.samples[f] = s / sig.channels;
  }
  return out;
}

AudioSignal resample_mono(const AudioSignal& sig, int target_rate) {
  if (sig.sample_rate < 8000 || sig.sample_rate > 192000) {
    throw ConfigError("unsupported sample rate " + std::to_string(sig.sample_rate) +
                      " Hz (supported: 8000..192000)");
  }
  AudioSignal mono = to_mono(sig);
  if (mono.sample_rate == target_rate) return mono;
  const kernels::ResamplePlan plan = kernels::make_resample_plan(mono.sample_rate, target_rate);
  AudioSignal out;
  out.sample_rate = target_rate;
  out.channels = 1;
  out.samples.resize(plan.output_length(mono.samples.size()));
  kernels::resample_parallel(plan, mono.samples, out.samples);
  return out;
}

AudioSignal pad_or_trim(const AudioSignal& sig, std::size_t length) {
  require(sig.channels == 1, "pad_or_trim expects a mono signal");
  AudioSignal out = sig;
  out.samples.resize(length, 0.0);
  return out;
}

AudioSignal pad_or_trim(const AudioSignal& sig, const FeatureParams& p) {
  require(sig.sample_rate == p.sample_rate, "pad_or_trim expects the feature sample rate");
  return pad_or_trim(sig, p.clip_samples());
}

// ---------------------------------------------------------------------------
// Mel filterbank

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

namespace {

std::vector<double> mel_points_hz(const FeatureParams& p) {
  const double lo = hz_to_mel(p.fmin), hi = hz_to_mel(p.fmax);
  std::vector<double> f(static_cast<std::size_t>(p.n_mels) + 2);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = mel_to_hz(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(f.size() - 1));
  }
  return f;
}

}  // namespace

std::vector<double> mel_center_frequencies(const FeatureParams& p) {
  auto f = mel_points_hz(p);
  return {f.begin() + 1, f.end() - 1};
}

std::vector<double> mel_filterbank(const FeatureParams& p) {
  validate(p);
  const int n_bins = p.n_fft / 2 + 1;
  const auto f = mel_points_hz(p);
  std::vector<double> fb(static_cast<std::size_t>(p.n_mels) * n_bins, 0.0);
  for (int b = 0; b < n_bins; ++b) {
    const double hz = (p.sample_rate / 2.0) * b / (n_bins - 1);
    for (int m = 0; m < p.n_mels; ++m) {
      const double down = (hz - f[m]) / (f[m + 1] - f[m]);
      const double up = (f[m + 2] - hz) / (f[m + 2] - f[m + 1]);
      fb[static_cast<std::size_t>(m) * n_bins + b] = std::max(0.0, std::min(down, up));
    }
  }
  return fb;
}

kernels::MelPlan make_mel_plan(const FeatureParams& p) {
  validate(p);
  kernels::MelPlan plan;
  plan.n_fft = p.n_fft;
  plan.hop = p.hop;
  plan.n_frames = static_cast<int>(p.n_frames());
  plan.n_mels = p.n_mels;
  plan.log_floor = p.log_floor;
  plan.window.assign(p.n_fft, 0.0);
  const int offset = (p.n_fft - p.win_length) / 2;
  for (int j = 0; j < p.win_length; ++j) {
    plan.window[offset + j] = 0.5 - 0.5 * std::cos(2.0 * M_PI * j / p.win_length);
  }
  plan.filterbank = mel_filterbank(p);
  const int n_bins = p.n_fft / 2 + 1;
  for (int m = 0; m < p.n_mels; ++m) {
    const double* row = plan.filterbank.data() + static_cast<std::size_t>(m) * n_bins;
    int first = 0, last = n_bins;
    while (first < n_bins && row[first] == 0.0) ++first;
    while (last > first && row[last - 1] == 0.0) --last;
    plan.support.emplace_back(first, last);
  }
  return plan;
}

namespace {

std::vector<double> reflect_pad(const std::vector<double>& x, std::size_t pad) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  std::vector<double> out(x.size() + 2 * pad);
  for (std::size_t j = 0; j < out.size(); ++j) {
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(pad);
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
    out[j] = x[static_cast<std::size_t>(i)];
  }
  return out;
}

template <typename Kernel>
MelSpectrogram compute_mel(const AudioSignal& sig, const FeatureParams& p, Kernel kernel) {
  validate(p);
  require(sig.channels == 1, "mel_spectrogram expects a mono signal");
  require(sig.sample_rate == p.sample_rate, "mel_spectrogram expects the feature sample rate");
  require(sig.samples.size() == p.clip_samples(), "mel_spectrogram expects a padded clip");
  for (std::size_t i = 0; i < sig.samples.size(); ++i) {
    if (!std::isfinite(sig.samples[i])) {
      throw DataError("non-finite audio sample at index " + std::to_string(i));
    }
  }
  const kernels::MelPlan plan = make_mel_plan(p);
  const auto padded = reflect_pad(sig.samples, static_cast<std::size_t>(p.n_fft / 2));
  MelSpectrogram m;
  m.n_mels = static_cast<std::size_t>(p.n_mels);
  m.n_frames = p.n_frames();
  m.params = p;
  m.values.resize(m.n_mels * m.n_frames);
  kernel(plan, padded, m.values);
  return m;
}

}  // namespace

MelSpectrogram mel_spectrogram(const AudioSignal& sig, const FeatureParams& p) {
  return compute_mel(sig, p, [](const auto& plan, const auto& padded, auto& out) {
    kernels::log_mel_parallel(plan, padded, out);
  });
}

MelSpectrogram mel_spectrogram_serial(const AudioSignal& sig, const FeatureParams& p) {
  return compute_mel(sig, p, [](const auto& plan, const auto& padded, auto& out) {
    kernels::log_mel_serial(plan, padded, out);
  });
}

MelSpectrogram featurize(const AudioSignal& raw, const FeatureParams& p) {
  return mel_spectrogram(pad_or_trim(resample_mono(raw, p.sample_rate), p), p);
}

// ---------------------------------------------------------------------------
// .melbin

namespace {
constexpr std::string_view kMelMagic = "PPPRMEL1";
}  // namespace

std::string encode_melbin(const MelSpectrogram& m) {
  require(m.values.size() == m.n_mels * m.n_frames, "mel matrix shape mismatch");
  std::string out(kMelMagic);
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(m.n_mels));
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(m.n_frames));
  out.reserve(out.size() + m.values.size() * 4);
  for (double v : m.values) binio::put<float>(out, static_cast<float>(v));
  return out;
}

MelSpectrogram decode_melbin(std::string_view bytes) {
  binio::Reader r(bytes, "melbin");
  if (r.take(kMelMagic.size()) != kMelMagic) throw FormatError("melbin: bad magic");
  MelSpectrogram m;
  m.n_mels = r.get<std::uint32_t>();
  m.n_frames = r.get<std::uint32_t>();
  const std::size_t count = m.n_mels * m.n_frames;
  if (r.remaining() != count * sizeof(float)) {
    throw FormatError("melbin: payload size does not match header shape");
  }
  m.values.resize(count);
  for (auto& v : m.values) v = r.get<float>();
  return m;
}

void save_melbin(const std::filesystem::path& path, const MelSpectrogram& m) {
  binio::write_file(path, encode_melbin(m));
}

MelSpectrogram load_melbin(const std::filesystem::path& path) {
  return decode_melbin(binio::read_file(path));
}

}  // namespace pppr
