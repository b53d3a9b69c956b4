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

// Toy-scale denoising diffusion: linear noise schedule, closed-form and
// iterated forward noising, the epsilon-prediction loss, ancestral reverse
// sampling, and a linear epsilon predictor trained by gradient descent.
// Batches are b x d matrices, one latent per row.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace pppr::diffusion {

struct NoiseSchedule {
  int n_steps = 0;
  // Index k holds step n = k + 1.
  std::vector<double> betas;
  std::vector<double> alphas;
  std::vector<double> alpha_bars;

  double beta(int n) const { return betas.at(static_cast<std::size_t>(n - 1)); }
  double alpha(int n) const { return alphas.at(static_cast<std::size_t>(n - 1)); }
  // alpha_bar(0) is 1 by convention.
  double alpha_bar(int n) const {
    return n == 0 ? 1.0 : alpha_bars.at(static_cast<std::size_t>(n - 1));
  }
};

NoiseSchedule make_schedule(int n_steps, double beta_start = 1e-4, double beta_end = 2e-2);
NoiseSchedule schedule_from_betas(std::vector<double> betas);

struct LatentBatch {
  Eigen::MatrixXd z;     // b x d
  Eigen::MatrixXd cond;  // b x c, fixed per sample
};

// z_n = sqrt(alpha_bar) z0 + sqrt(1 - alpha_bar) eps
Eigen::MatrixXd forward_marginal(const Eigen::MatrixXd& z0, double alpha_bar,
                                 const Eigen::MatrixXd& eps);
Eigen::MatrixXd forward_marginal(const Eigen::MatrixXd& z0, int n, const Eigen::MatrixXd& eps,
                                 const NoiseSchedule& sched);

// z_n = sqrt(1 - beta) z_prev + sqrt(beta) noise
Eigen::MatrixXd forward_step(const Eigen::MatrixXd& z_prev, double beta,
                             const Eigen::MatrixXd& noise);
Eigen::MatrixXd forward_step(const Eigen::MatrixXd& z_prev, int n, const NoiseSchedule& sched,
                             const Eigen::MatrixXd& noise);

// b x d standard normal matrix; row i drawn from stream (seed, i).
Eigen::MatrixXd standard_normal(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

// Predicts the added noise for every row of z_n at its step.
using EpsilonFn = std::function<Eigen::MatrixXd(
    const Eigen::MatrixXd& z_n, std::span<const int> steps, const Eigen::MatrixXd& cond)>;

EpsilonFn zero_predictor();

// The random quantities one loss evaluation uses: a step per row, uniform
// in [1, N], and standard normal noise.
struct TrainingDraw {
  std::vector<int> steps;
  Eigen::MatrixXd eps;
};

TrainingDraw draw_training(Eigen::Index rows, Eigen::Index dim, const NoiseSchedule& sched,
                           std::uint64_t seed);

// Mean over rows of ||eps - eps_theta(z_n, n, cond)||^2.
double training_loss(const EpsilonFn& pred, const LatentBatch& batch, const NoiseSchedule& sched,
                     const TrainingDraw& draw);
double training_loss(const EpsilonFn& pred, const LatentBatch& batch, const NoiseSchedule& sched,
                     std::uint64_t seed);

// Ancestral sampling from z_N ~ N(0, I) with posterior variance
// beta_tilde_n = beta_n (1 - alpha_bar_{n-1}) / (1 - alpha_bar_n).
Eigen::MatrixXd reverse_sample(const EpsilonFn& pred, const NoiseSchedule& sched,
                               const Eigen::MatrixXd& cond, Eigen::Index dim,
                               std::uint64_t seed);

// eps_hat = W f with f = [z_n, cond, sqrt(alpha_bar_n), sqrt(1 - alpha_bar_n), 1]
// followed by z_n and cond each scaled by sqrt(alpha_bar_n).
struct LinearPredictor {
  Eigen::MatrixXd weights;  // d x feature_dim(d, c)

  static Eigen::Index feature_dim(Eigen::Index d, Eigen::Index c) { return 2 * (d + c) + 3; }
  static LinearPredictor zeros(Eigen::Index d, Eigen::Index c);

  Eigen::MatrixXd features(const Eigen::MatrixXd& z_n, std::span<const int> steps,
                           const Eigen::MatrixXd& cond, const NoiseSchedule& sched) const;
  Eigen::MatrixXd predict(const Eigen::MatrixXd& z_n, std::span<const int> steps,
                          const Eigen::MatrixXd& cond, const NoiseSchedule& sched) const;
  EpsilonFn as_fn(const NoiseSchedule& sched) const;
};

struct LossAndGradient {
  double loss = 0.0;
  Eigen::MatrixXd gradient;  // same shape as weights
};

LossAndGradient loss_and_gradient(const LinearPredictor& p, const LatentBatch& batch,
                                  const NoiseSchedule& sched, const TrainingDraw& draw);

struct FitOptions {
  int iterations = 2000;
  double learning_rate = 0.05;
  std::uint64_t seed = 7;
};

struct FitResult {
  LinearPredictor predictor;
  // Loss on a fixed evaluation draw, before training and after each step.
  std::vector<double> loss_history;
};

FitResult fit_linear_predictor(const LatentBatch& data, const NoiseSchedule& sched,
                               const FitOptions& opts);

// Clean latents that are a fixed random linear function of random
// condition vectors.
LatentBatch make_synthetic_task(Eigen::Index samples, Eigen::Index dim, Eigen::Index cond_dim,
                                std::uint64_t seed);

struct GradientCheck {
  double max_relative_error = 0.0;
  int trials = 0;
};

// Compares directional derivatives from loss_and_gradient against central
// differences at `trials` random weight settings.
GradientCheck check_gradient(const LatentBatch& batch, const NoiseSchedule& sched,
                             std::uint64_t seed, int trials = 10, double step = 1e-5);

// Monte-Carlo moments of samples (rows) per dimension.
struct Moments {
  Eigen::VectorXd mean;
  Eigen::VectorXd var;  // unbiased
};

Moments sample_moments(const Eigen::MatrixXd& samples);

struct MomentComparison {
  int step = 0;
  Moments closed_form;
  Moments iterated;
  double max_mean_z = 0.0;  // |difference| in standard errors
  double max_var_z = 0.0;
  bool passed = false;
};

// Draws `draws` samples of z_n from a fixed z0 both ways and compares.
MomentComparison compare_forward_moments(const NoiseSchedule& sched, int n,
                                         const Eigen::VectorXd& z0, Eigen::Index draws,
                                         std::uint64_t seed);

struct SandboxConfig {
  int dim = 4;
  int cond_dim = 8;
  int n_steps = 1000;
  int iterations = 2000;
  double learning_rate = 0.05;
  int samples = 256;
  Eigen::Index mc_draws = 100000;
  std::uint64_t seed = 7;
};

void validate(const SandboxConfig& cfg);

// Runs the schedule, noising, loss, and training checks and reports them.
nlohmann::ordered_json run_sandbox(const SandboxConfig& cfg);

}  // namespace pppr::diffusion
