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

// Data-parallel inner loops. Every kernel comes as an OpenMP version, used
// by the public API, and a plain serial reference kept for tests and the
// benchmark. Each output element of a parallel kernel is produced by exactly
// one thread in a fixed order, so results do not depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pppr::kernels {

// Pairwise (cascade) summation; error grows as O(log n).
double pairwise_sum(std::span<const double> xs);

// ---------------------------------------------------------------------------
// Resampling

// Polyphase windowed-sinc resampler for the rational ratio out/in.
struct ResamplePlan {
  int in_rate = 0;
  int out_rate = 0;
  std::int64_t up = 1;    // L
  std::int64_t down = 1;  // M
  double cutoff = 0.5;    // cycles per input sample
  double half_width = 0;  // kernel half-width in input samples
  int taps = 0;           // per phase
  int left = 0;           // taps to the left of the base sample, inclusive
  std::vector<double> table;  // up x taps, row-major

  std::size_t output_length(std::size_t input_length) const;
};

ResamplePlan make_resample_plan(int in_rate, int out_rate);

// Table-driven, OpenMP over output samples.
void resample_parallel(const ResamplePlan& plan, std::span<const double> in,
                       std::span<double> out);
// Evaluates the windowed sinc directly for every tap.
void resample_serial(const ResamplePlan& plan, std::span<const double> in,
                     std::span<double> out);

// ---------------------------------------------------------------------------
// Log-mel spectrogram

struct MelPlan {
  int n_fft = 0;
  int hop = 0;
  int n_frames = 0;  // frames kept after truncation
  int n_mels = 0;
  double log_floor = 1e-5;
  std::vector<double> window;      // n_fft (zero-padded when win < n_fft)
  std::vector<double> filterbank;  // n_mels x (n_fft/2+1), row-major
  // Nonzero bin range [first, last) of each filter row.
  std::vector<std::pair<int, int>> support;
};

// `padded` is the reflect-padded signal; `out` is n_mels x n_frames,
// row-major.
void log_mel_parallel(const MelPlan& plan, std::span<const double> padded,
                      std::span<double> out);
void log_mel_serial(const MelPlan& plan, std::span<const double> padded,
                    std::span<double> out);

// ---------------------------------------------------------------------------
// Statistics

// Unbiased (n-1) covariance of the rows of x around `mean`.
Eigen::MatrixXd covariance_parallel(const Eigen::MatrixXd& x, const Eigen::VectorXd& mean);
Eigen::MatrixXd covariance_serial(const Eigen::MatrixXd& x, const Eigen::VectorXd& mean);

// KL(p_i || q) for every row p_i, natural log, 0 log 0 = 0.
std::vector<double> row_kl_parallel(const Eigen::MatrixXd& p, const Eigen::VectorXd& q);
std::vector<double> row_kl_serial(const Eigen::MatrixXd& p, const Eigen::VectorXd& q);

// ---------------------------------------------------------------------------
// Diffusion forward chain

// Runs z <- sqrt(alpha_k) z + sqrt(beta_k) noise for k = 1..steps on each
// of `samples` copies of z0, drawing noise from a per-sample stream keyed on
// (seed, sample). Output is samples x dim, row-major.
void forward_chain_parallel(std::span<const double> z0, std::span<const double> betas,
                            std::size_t steps, std::size_t samples, std::uint64_t seed,
                            std::span<double> out);
void forward_chain_serial(std::span<const double> z0, std::span<const double> betas,
                          std::size_t steps, std::size_t samples, std::uint64_t seed,
                          std::span<double> out);

}  // namespace pppr::kernels
