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

#include "pppr/diffusion_sandbox.hpp"
#include "pppr/error.hpp"

namespace pppr::diffusion {
namespace {

// Recovers the exact noise for a known clean batch.
EpsilonFn oracle_for(const Eigen::MatrixXd& z0, const NoiseSchedule& sched) {
  return [z0, sched](const Eigen::MatrixXd& z_n, std::span<const int> steps,
                     const Eigen::MatrixXd&) {
    Eigen::MatrixXd eps(z_n.rows(), z_n.cols());
    for (Eigen::Index i = 0; i < z_n.rows(); ++i) {
      const double ab = sched.alpha_bar(steps[static_cast<std::size_t>(i)]);
      eps.row(i) = (z_n.row(i) - std::sqrt(ab) * z0.row(i)) / std::sqrt(1.0 - ab);
    }
    return eps;
  };
}

TEST(Schedule, LinearEndpointsAndProducts) {
  const auto s = make_schedule(1000);
  EXPECT_EQ(s.n_steps, 1000);
  EXPECT_DOUBLE_EQ(s.beta(1), 1e-4);
  EXPECT_DOUBLE_EQ(s.beta(1000), 2e-2);
  EXPECT_DOUBLE_EQ(s.alpha_bar(0), 1.0);
  EXPECT_DOUBLE_EQ(s.alpha(1), 1.0 - 1e-4);
  EXPECT_NEAR(s.alpha_bar(2), (1 - 1e-4) * (1 - s.beta(2)), 1e-15);
  EXPECT_LT(s.alpha_bar(1000), 1e-4);
  EXPECT_GT(s.alpha_bar(1000), 0.0);
  const auto one = make_schedule(1);
  EXPECT_DOUBLE_EQ(one.beta(1), 1e-4);
}

TEST(Schedule, RejectsBadInput) {
  EXPECT_THROW(make_schedule(0), ContractViolation);
  EXPECT_THROW(schedule_from_betas({0.1, 1.0}), ContractViolation);
  EXPECT_THROW(schedule_from_betas({}), ContractViolation);
  EXPECT_THROW(make_schedule(10).beta(11), std::out_of_range);
}

TEST(Forward, MarginalLimits) {
  const Eigen::MatrixXd z0 = Eigen::MatrixXd::Constant(2, 3, 2.0);
  const Eigen::MatrixXd eps = Eigen::MatrixXd::Constant(2, 3, -1.0);
  EXPECT_TRUE(forward_marginal(z0, 1.0, eps).isApprox(z0));
  EXPECT_TRUE(forward_marginal(z0, 0.0, eps).isApprox(eps));
  const auto s = make_schedule(10);
  EXPECT_TRUE(forward_marginal(z0, 0, eps, s).isApprox(z0));
  EXPECT_TRUE(forward_step(z0, 0.0, eps).isApprox(z0));
  EXPECT_TRUE(forward_step(z0, 1, s, eps).isApprox(std::sqrt(1 - s.beta(1)) * z0 +
                                                    std::sqrt(s.beta(1)) * eps));
}

TEST(Forward, IteratedMatchesClosedFormMoments) {
  const auto s = make_schedule(100);
  const Eigen::VectorXd z0 = Eigen::Vector3d(1.0, -2.0, 0.5);
  for (int n : {1, 10, 100}) {
    const auto c = compare_forward_moments(s, n, z0, 20000, 3);
    EXPECT_TRUE(c.passed) << n << " mean z " << c.max_mean_z << " var z " << c.max_var_z;
  }
}

TEST(Forward, ZeroStartVarianceIsOneMinusAlphaBar) {
  const auto s = make_schedule(1000);
  const Eigen::Index draws = 100000;
  const Eigen::MatrixXd z0 = Eigen::MatrixXd::Zero(draws, 2);
  for (int n : {1, 50, 500, 1000}) {
    const auto m = sample_moments(forward_marginal(z0, n, standard_normal(draws, 2, n), s));
    const double v = 1.0 - s.alpha_bar(n);
    // Standard error of a Gaussian sample variance.
    const double se = v * std::sqrt(2.0 / (draws - 1));
    for (Eigen::Index j = 0; j < 2; ++j) EXPECT_NEAR(m.var(j), v, 3.0 * se) << n;
  }
}

TEST(Forward, LongChainReachesStandardNormal) {
  SandboxConfig c;
  c.iterations = 0;
  c.samples = 16;
  const auto r = run_sandbox(c);
  ASSERT_TRUE(r.contains("convergence"));
  EXPECT_TRUE(r["convergence"]["passed"].get<bool>()) << r["convergence"].dump();
}

TEST(Loss, OracleIsZero) {
  const auto s = make_schedule(100);
  const auto batch = make_synthetic_task(64, 4, 8, 1);
  const auto draw = draw_training(64, 4, s, 5);
  const EpsilonFn exact = [&](const Eigen::MatrixXd&, std::span<const int>,
                              const Eigen::MatrixXd&) { return draw.eps; };
  EXPECT_EQ(training_loss(exact, batch, s, draw), 0.0);
  // Recovering the noise from z_n only holds up to rounding.
  EXPECT_LT(training_loss(oracle_for(batch.z, s), batch, s, 5), 1e-20);
}

TEST(Loss, ZeroPredictorNearDimension) {
  const auto s = make_schedule(100);
  const auto batch = make_synthetic_task(20000, 4, 8, 2);
  const double l = training_loss(zero_predictor(), batch, s, 6);
  // Per-row ||eps||^2 is chi-square(4): variance 8.
  EXPECT_NEAR(l, 4.0, 5.0 * std::sqrt(8.0 / 20000));
  EXPECT_EQ(l, training_loss(zero_predictor(), batch, s, 6));
  EXPECT_NE(l, training_loss(zero_predictor(), batch, s, 7));
}

TEST(Loss, DrawIsDeterministicAndInRange) {
  const auto s = make_schedule(50);
  const auto a = draw_training(500, 3, s, 11);
  const auto b = draw_training(500, 3, s, 11);
  EXPECT_EQ(a.steps, b.steps);
  EXPECT_EQ(a.eps, b.eps);
  for (int n : a.steps) {
    EXPECT_GE(n, 1);
    EXPECT_LE(n, 50);
  }
}

TEST(Reverse, SingleStepOracleRecoversClean) {
  const auto s = make_schedule(1);
  const auto batch = make_synthetic_task(16, 4, 8, 3);
  const auto out = reverse_sample(oracle_for(batch.z, s), s, batch.cond, 4, 9);
  EXPECT_LT((out - batch.z).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Reverse, DeterministicAndFinite) {
  const auto s = make_schedule(200);
  const auto batch = make_synthetic_task(8, 4, 8, 3);
  const auto a = reverse_sample(zero_predictor(), s, batch.cond, 4, 1);
  EXPECT_TRUE(a.allFinite());
  EXPECT_EQ(a, reverse_sample(zero_predictor(), s, batch.cond, 4, 1));
  EXPECT_NE(a, reverse_sample(zero_predictor(), s, batch.cond, 4, 2));
}

TEST(Linear, FeatureLayoutAndZeroWeights) {
  const auto s = make_schedule(10);
  const auto p = LinearPredictor::zeros(2, 3);
  EXPECT_EQ(p.weights.rows(), 2);
  EXPECT_EQ(p.weights.cols(), LinearPredictor::feature_dim(2, 3));
  Eigen::MatrixXd z(1, 2), c(1, 3);
  z << 1, 2;
  c << 3, 4, 5;
  const std::vector<int> steps = {4};
  const auto f = p.features(z, steps, c, s);
  ASSERT_EQ(f.cols(), 13);
  EXPECT_EQ(f(0, 0), 1);
  EXPECT_EQ(f(0, 2), 3);
  EXPECT_TRUE(p.predict(z, steps, c, s).isZero());
}

TEST(Linear, LearningRateZeroKeepsEverythingFixed) {
  const auto s = make_schedule(100);
  const auto batch = make_synthetic_task(64, 4, 8, 4);
  const auto r = fit_linear_predictor(batch, s, {25, 0.0, 7});
  ASSERT_EQ(r.loss_history.size(), 26u);
  for (double l : r.loss_history) EXPECT_EQ(l, r.loss_history.front());
  EXPECT_TRUE(r.predictor.weights.isZero());
}

TEST(Linear, DivergingStepSizeIsReported) {
  const auto s = make_schedule(100);
  const auto batch = make_synthetic_task(64, 4, 8, 4);
  EXPECT_THROW(fit_linear_predictor(batch, s, {5000, 1e6, 7}), DivergenceError);
}

TEST(Linear, GradientMatchesFiniteDifferences) {
  const auto s = make_schedule(100);
  const auto batch = make_synthetic_task(32, 3, 5, 5);
  const auto g = check_gradient(batch, s, 8, 10);
  EXPECT_EQ(g.trials, 10);
  EXPECT_LT(g.max_relative_error, 1e-5);
}

TEST(Linear, TrainingHalvesLoss) {
  const auto s = make_schedule(1000);
  const auto batch = make_synthetic_task(256, 4, 8, 7);
  const auto r = fit_linear_predictor(batch, s, FitOptions{});
  EXPECT_LT(r.loss_history.back(), 0.5 * r.loss_history.front());
}

TEST(Sandbox, ConfigValidation) {
  SandboxConfig c;
  EXPECT_NO_THROW(validate(c));
  c.mc_draws = 1;
  EXPECT_THROW(validate(c), ConfigError);
  c = {};
  c.learning_rate = -1;
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Sandbox, SmallRunReportsAllSections) {
  SandboxConfig c;
  c.n_steps = 100;
  c.iterations = 300;
  c.mc_draws = 20000;
  c.samples = 128;
  const auto r = run_sandbox(c);
  for (const char* key : {"config", "schedule", "forward_moments", "loss_checks", "training",
                          "gradient_check", "reverse", "passed"}) {
    EXPECT_TRUE(r.contains(key)) << key;
  }
  // The stationarity check only applies to long chains.
  EXPECT_FALSE(r.contains("convergence"));
  EXPECT_EQ(r["loss_checks"]["oracle_loss"], 0.0);
  EXPECT_EQ(r["training"]["loss_history"].size(), 301u);
  EXPECT_EQ(r.dump(), run_sandbox(c).dump());
}

}  // namespace
}  // namespace pppr::diffusion
