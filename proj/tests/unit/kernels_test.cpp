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
#include "pppr/kernels.hpp"

namespace pppr {
namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

TEST(PairwiseSum, MatchesExactSumAndResistsDrift) {
  EXPECT_DOUBLE_EQ(kernels::pairwise_sum({}), 0.0);
  std::vector<double> xs(1 << 20, 0.1);
  EXPECT_NEAR(kernels::pairwise_sum(xs), 0.1 * xs.size(), 1e-6);
  const std::vector<double> small = {1.0, 2.0, 3.5};
  EXPECT_DOUBLE_EQ(kernels::pairwise_sum(small), 6.5);
}

TEST(Resample, PlanReducesRatio) {
  const auto p = kernels::make_resample_plan(44100, 16000);
  EXPECT_EQ(p.up, 160);
  EXPECT_EQ(p.down, 441);
  EXPECT_EQ(p.output_length(44100), 16000u);
}

TEST(Resample, ParallelMatchesSerial) {
  for (int rate : {8000, 22050, 44100, 48000, 96000}) {
    const auto plan = kernels::make_resample_plan(rate, 16000);
    const auto in = noise(static_cast<std::size_t>(rate) / 20, rate);
    std::vector<double> a(plan.output_length(in.size())), b(a.size());
    kernels::resample_parallel(plan, in, a);
    kernels::resample_serial(plan, in, b);
    EXPECT_EQ(a, b) << rate;
  }
}

TEST(Resample, PreservesInBandSine) {
  const int in_rate = 44100;
  const double f = 1000.0;
  std::vector<double> in(in_rate);
  for (std::size_t i = 0; i < in.size(); ++i) {
    in[i] = std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) / in_rate);
  }
  const auto plan = kernels::make_resample_plan(in_rate, 16000);
  std::vector<double> out(plan.output_length(in.size()));
  kernels::resample_parallel(plan, in, out);
  double max_err = 0.0;
  for (std::size_t n = 400; n + 400 < out.size(); ++n) {
    const double expect = std::sin(2.0 * std::numbers::pi * f * static_cast<double>(n) / 16000.0);
    max_err = std::max(max_err, std::abs(out[n] - expect));
  }
  EXPECT_LT(max_err, 1e-3);
}

TEST(LogMel, ParallelMatchesSerial) {
  FeatureParams p;
  p.clip_seconds = 0.5;
  const auto plan = make_mel_plan(p);
  const auto padded = noise(p.clip_samples() + static_cast<std::size_t>(p.n_fft), 5);
  std::vector<double> a(static_cast<std::size_t>(plan.n_mels) * plan.n_frames), b(a.size());
  kernels::log_mel_parallel(plan, padded, a);
  kernels::log_mel_serial(plan, padded, b);
  EXPECT_EQ(a, b);
}

TEST(Covariance, ParallelMatchesSerialAndEigen) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd x(300, 12);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
  const Eigen::VectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd a = kernels::covariance_parallel(x, mean);
  const Eigen::MatrixXd b = kernels::covariance_serial(x, mean);
  const Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
  const Eigen::MatrixXd ref = centered.transpose() * centered / 299.0;
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((a - ref).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE(a.isApprox(a.transpose(), 0.0));
}

TEST(RowKl, ParallelMatchesSerialAndHandlesZeros) {
  Eigen::MatrixXd p(3, 2);
  p << 0.5, 0.5, 1.0, 0.0, 0.25, 0.75;
  Eigen::VectorXd q(2);
  q << 0.5, 0.5;
  const auto a = kernels::row_kl_parallel(p, q);
  const auto b = kernels::row_kl_serial(p, q);
  EXPECT_EQ(a, b);
  EXPECT_DOUBLE_EQ(a[0], 0.0);
  EXPECT_NEAR(a[1], std::log(2.0), 1e-15);
  EXPECT_NEAR(a[2], 0.25 * std::log(0.5) + 0.75 * std::log(1.5), 1e-15);
}

TEST(ForwardChain, ParallelMatchesSerial) {
  const std::vector<double> z0 = {1.0, -2.0, 0.5};
  const std::vector<double> betas(50, 0.02);
  std::vector<double> a(3 * 500), b(a.size());
  kernels::forward_chain_parallel(z0, betas, 50, 500, 9, a);
  kernels::forward_chain_serial(z0, betas, 50, 500, 9, b);
  EXPECT_EQ(a, b);
  std::vector<double> c(a.size());
  kernels::forward_chain_serial(z0, betas, 0, 500, 9, c);
  for (std::size_t s = 0; s < 500; ++s) EXPECT_EQ(c[s * 3 + 1], -2.0);
}

}  // namespace
}  // namespace pppr
