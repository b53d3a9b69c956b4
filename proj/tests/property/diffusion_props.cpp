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
#include <random>

#include "pppr/diffusion_sandbox.hpp"

namespace pppr::diffusion {
namespace {

TEST(DiffusionProps, AlphaBarAndSnrStrictlyDecrease) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(1e-5, 0.2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> betas(1 + trial * 7);
    for (auto& b : betas) b = u(rng);
    const auto s = schedule_from_betas(betas);
    double prev_ab = 1.0, prev_snr = INFINITY;
    for (int n = 1; n <= s.n_steps; ++n) {
      const double ab = s.alpha_bar(n);
      const double snr = ab / (1.0 - ab);
      ASSERT_LT(ab, prev_ab);
      ASSERT_GT(ab, 0.0);
      ASSERT_LT(snr, prev_snr);
      prev_ab = ab;
      prev_snr = snr;
    }
  }
}

TEST(DiffusionProps, MarginalInterpolatesNorms) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto z0 = standard_normal(3, 4, trial);
    const auto eps = standard_normal(3, 4, trial + 1000);
    const double ab = u(rng);
    const auto zn = forward_marginal(z0, ab, eps);
    const Eigen::MatrixXd expect = std::sqrt(ab) * z0 + std::sqrt(1 - ab) * eps;
    ASSERT_LT((zn - expect).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(DiffusionProps, OracleLossZeroForAnySeed) {
  const auto s = make_schedule(50);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto batch = make_synthetic_task(16, 3, 4, seed);
    const auto draw = draw_training(16, 3, s, seed * 31);
    // Oracle indexed by row returns the exact noise of the draw.
    const EpsilonFn oracle = [&](const Eigen::MatrixXd&, std::span<const int>,
                                 const Eigen::MatrixXd&) { return draw.eps; };
    ASSERT_EQ(training_loss(oracle, batch, s, draw), 0.0);
    ASSERT_GT(training_loss(zero_predictor(), batch, s, draw), 0.0);
  }
}

TEST(DiffusionProps, GradientCheckAcrossShapes) {
  const auto s = make_schedule(100);
  for (int d = 1; d <= 4; ++d) {
    for (int c = 1; c <= 3; ++c) {
      const auto batch = make_synthetic_task(20, d, c, d * 10 + c);
      EXPECT_LT(check_gradient(batch, s, d + c, 5).max_relative_error, 1e-5) << d << "x" << c;
    }
  }
}

}  // namespace
}  // namespace pppr::diffusion
