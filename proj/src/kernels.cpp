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

#include "pppr/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include <unsupported/Eigen/FFT>

#include "pppr/error.hpp"
#include "pppr/random.hpp"

namespace pppr::kernels {

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 16) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

// ---------------------------------------------------------------------------
// Resampling

namespace {

constexpr double kZeroCrossings = 32.0;
constexpr double kRolloff = 0.945;
constexpr double kKaiserBeta = 8.6;

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double kernel_value(const ResamplePlan& plan, double t) {
  const double u = t / plan.half_width;
  if (std::abs(u) >= 1.0) return 0.0;
  const double win = std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - u * u)) /
                     std::cyl_bessel_i(0.0, kKaiserBeta);
  return 2.0 * plan.cutoff * sinc(2.0 * plan.cutoff * t) * win;
}

}  // namespace

std::size_t ResamplePlan::output_length(std::size_t n) const {
  const auto num = static_cast<std::int64_t>(n) * up;
  return static_cast<std::size_t>((num + down - 1) / down);
}

ResamplePlan make_resample_plan(int in_rate, int out_rate) {
  require(in_rate > 0 && out_rate > 0, "sample rates must be positive");
  ResamplePlan p;
  p.in_rate = in_rate;
  p.out_rate = out_rate;
  const std::int64_t g = std::gcd(in_rate, out_rate);
  p.up = out_rate / g;
  p.down = in_rate / g;
  p.cutoff = 0.5 * std::min(1.0, static_cast<double>(out_rate) / in_rate) * kRolloff;
  p.half_width = kZeroCrossings / (2.0 * p.cutoff);
  const int h = static_cast<int>(std::ceil(p.half_width));
  p.left = h - 1;
  p.taps = 2 * h;
  p.table.resize(static_cast<std::size_t>(p.up) * p.taps);
  for (std::int64_t phase = 0; phase < p.up; ++phase) {
    const double frac = static_cast<double>(phase) / static_cast<double>(p.up);
    for (int j = 0; j < p.taps; ++j) {
      p.table[static_cast<std::size_t>(phase) * p.taps + j] =
          kernel_value(p, frac + p.left - j);
    }
  }
  return p;
}

void resample_parallel(const ResamplePlan& plan, std::span<const double> in,
                       std::span<double> out) {
  require(out.size() == plan.output_length(in.size()), "resample output size mismatch");
  const auto n_in = static_cast<std::int64_t>(in.size());
  const auto n_out = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t n = 0; n < n_out; ++n) {
    const std::int64_t pos = n * plan.down;
    const std::int64_t base = pos / plan.up;
    const std::int64_t phase = pos % plan.up;
    const double* row = plan.table.data() + phase * plan.taps;
    const std::int64_t k0 = base - plan.left;
    double acc = 0.0;
    const int j_lo = static_cast<int>(std::max<std::int64_t>(0, -k0));
    const int j_hi = static_cast<int>(std::min<std::int64_t>(plan.taps, n_in - k0));
    for (int j = j_lo; j < j_hi; ++j) acc += row[j] * in[static_cast<std::size_t>(k0 + j)];
    out[static_cast<std::size_t>(n)] = acc;
  }
}

void resample_serial(const ResamplePlan& plan, std::span<const double> in,
                     std::span<double> out) {
  require(out.size() == plan.output_length(in.size()), "resample output size mismatch");
  const auto n_in = static_cast<std::int64_t>(in.size());
  for (std::size_t n = 0; n < out.size(); ++n) {
    const std::int64_t pos = static_cast<std::int64_t>(n) * plan.down;
    const std::int64_t base = pos / plan.up;
    const double* row = plan.table.data() + (pos % plan.up) * plan.taps;
    double acc = 0.0;
    for (int j = 0; j < plan.taps; ++j) {
      const std::int64_t k = base - plan.left + j;
      if (k < 0 || k >= n_in) continue;
      acc += row[j] * in[static_cast<std::size_t>(k)];
    }
    out[n] = acc;
  }
}

// ---------------------------------------------------------------------------
// Log-mel spectrogram

namespace {

void check_mel_io(const MelPlan& plan, std::span<const double> padded,
                  std::span<double> out) {
  require(out.size() == static_cast<std::size_t>(plan.n_mels) * plan.n_frames,
          "mel output size mismatch");
  const std::size_t need =
      static_cast<std::size_t>(plan.n_frames - 1) * plan.hop + plan.n_fft;
  require(plan.n_frames > 0 && padded.size() >= need, "padded signal too short for frame count");
}

// Magnitude spectrum of one windowed frame.
void frame_magnitude(const MelPlan& plan, std::span<const double> padded, int t,
                     Eigen::FFT<double>& fft, std::vector<double>& frame,
                     std::vector<std::complex<double>>& spec, std::vector<double>& mag) {
  const std::size_t start = static_cast<std::size_t>(t) * plan.hop;
  for (int j = 0; j < plan.n_fft; ++j) frame[j] = padded[start + j] * plan.window[j];
  fft.fwd(spec, frame);
  for (std::size_t b = 0; b < mag.size(); ++b) mag[b] = std::abs(spec[b]);
}

}  // namespace

void log_mel_parallel(const MelPlan& plan, std::span<const double> padded,
                      std::span<double> out) {
  check_mel_io(plan, padded, out);
  const int n_bins = plan.n_fft / 2 + 1;
#pragma omp parallel
  {
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    std::vector<double> frame(plan.n_fft), mag(n_bins);
    std::vector<std::complex<double>> spec;
#pragma omp for schedule(static)
    for (int t = 0; t < plan.n_frames; ++t) {
      frame_magnitude(plan, padded, t, fft, frame, spec, mag);
      for (int m = 0; m < plan.n_mels; ++m) {
        const double* row = plan.filterbank.data() + static_cast<std::size_t>(m) * n_bins;
        double acc = 0.0;
        for (int b = plan.support[m].first; b < plan.support[m].second; ++b) {
          acc += row[b] * mag[b];
        }
        out[static_cast<std::size_t>(m) * plan.n_frames + t] =
            std::log(std::max(acc, plan.log_floor));
      }
    }
  }
}

void log_mel_serial(const MelPlan& plan, std::span<const double> padded,
                    std::span<double> out) {
  check_mel_io(plan, padded, out);
  const int n_bins = plan.n_fft / 2 + 1;
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> frame(plan.n_fft), mag(n_bins);
  std::vector<std::complex<double>> spec;
  for (int t = 0; t < plan.n_frames; ++t) {
    frame_magnitude(plan, padded, t, fft, frame, spec, mag);
    for (int m = 0; m < plan.n_mels; ++m) {
      double acc = 0.0;
      for (int b = 0; b < n_bins; ++b) {
        acc += plan.filterbank[static_cast<std::size_t>(m) * n_bins + b] * mag[b];
      }
      out[static_cast<std::size_t>(m) * plan.n_frames + t] =
          std::log(std::max(acc, plan.log_floor));
    }
  }
}

// ---------------------------------------------------------------------------
// Statistics

Eigen::MatrixXd covariance_parallel(const Eigen::MatrixXd& x, const Eigen::VectorXd& mean) {
  const Eigen::Index n = x.rows(), d = x.cols();
  require(n >= 2, "covariance needs at least two rows");
  require(mean.size() == d, "mean dimension mismatch");
  // Column-major centered copy: column i is feature i across samples.
  const Eigen::MatrixXd xc = x.rowwise() - mean.transpose();
  Eigen::MatrixXd cov(d, d);
  const Eigen::Index pairs = d * (d + 1) / 2;
#pragma omp parallel
  {
    std::vector<double> prod(static_cast<std::size_t>(n));
#pragma omp for schedule(dynamic, 8)
    for (Eigen::Index p = 0; p < pairs; ++p) {
      // Unrank p into (i, j), i <= j.
      Eigen::Index i = 0, rem = p;
      while (rem >= d - i) {
        rem -= d - i;
        ++i;
      }
      const Eigen::Index j = i + rem;
      for (Eigen::Index k = 0; k < n; ++k) prod[k] = xc(k, i) * xc(k, j);
      const double v = pairwise_sum(prod) / static_cast<double>(n - 1);
      cov(i, j) = v;
      cov(j, i) = v;
    }
  }
  return cov;
}

Eigen::MatrixXd covariance_serial(const Eigen::MatrixXd& x, const Eigen::VectorXd& mean) {
  const Eigen::Index n = x.rows(), d = x.cols();
  require(n >= 2, "covariance needs at least two rows");
  require(mean.size() == d, "mean dimension mismatch");
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) s += (x(k, i) - mean(i)) * (x(k, j) - mean(j));
      cov(i, j) = s / static_cast<double>(n - 1);
    }
  }
  return 0.5 * (cov + cov.transpose());
}

namespace {

double kl_row(const Eigen::MatrixXd& p, Eigen::Index i, const Eigen::VectorXd& q) {
  double s = 0.0;
  for (Eigen::Index c = 0; c < p.cols(); ++c) {
    const double pc = p(i, c);
    if (pc > 0.0) s += pc * std::log(pc / q(c));
  }
  return s;
}

}  // namespace

std::vector<double> row_kl_parallel(const Eigen::MatrixXd& p, const Eigen::VectorXd& q) {
  require(p.cols() == q.size(), "distribution width mismatch");
  std::vector<double> out(static_cast<std::size_t>(p.rows()));
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < p.rows(); ++i) out[static_cast<std::size_t>(i)] = kl_row(p, i, q);
  return out;
}

std::vector<double> row_kl_serial(const Eigen::MatrixXd& p, const Eigen::VectorXd& q) {
  require(p.cols() == q.size(), "distribution width mismatch");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(p.rows()));
  for (Eigen::Index i = 0; i < p.rows(); ++i) out.push_back(kl_row(p, i, q));
  return out;
}

// ---------------------------------------------------------------------------
// Diffusion forward chain

namespace {

void run_chain(std::span<const double> z0, std::span<const double> betas,
               std::size_t steps, std::uint64_t seed, std::size_t s, double* row) {
  std::mt19937_64 rng = make_stream(seed, s);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::copy(z0.begin(), z0.end(), row);
  for (std::size_t k = 0; k < steps; ++k) {
    const double a = std::sqrt(1.0 - betas[k]);
    const double b = std::sqrt(betas[k]);
    for (std::size_t d = 0; d < z0.size(); ++d) row[d] = a * row[d] + b * normal(rng);
  }
}

void check_chain(std::span<const double> z0, std::span<const double> betas,
                 std::size_t steps, std::size_t samples, std::span<double> out) {
  require(steps <= betas.size(), "more steps than schedule entries");
  require(out.size() == samples * z0.size(), "forward chain output size mismatch");
}

}  // namespace

void forward_chain_parallel(std::span<const double> z0, std::span<const double> betas,
                            std::size_t steps, std::size_t samples, std::uint64_t seed,
                            std::span<double> out) {
  check_chain(z0, betas, steps, samples, out);
  const auto n = static_cast<std::ptrdiff_t>(samples);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    run_chain(z0, betas, steps, seed, static_cast<std::size_t>(s),
              out.data() + static_cast<std::size_t>(s) * z0.size());
  }
}

void forward_chain_serial(std::span<const double> z0, std::span<const double> betas,
                          std::size_t steps, std::size_t samples, std::uint64_t seed,
                          std::span<double> out) {
  check_chain(z0, betas, steps, samples, out);
  for (std::size_t s = 0; s < samples; ++s) {
    run_chain(z0, betas, steps, seed, s, out.data() + s * z0.size());
  }
}

}  // namespace pppr::kernels
