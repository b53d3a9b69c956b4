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

#include "pppr/diffusion_sandbox.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pppr/error.hpp"
#include "pppr/hash.hpp"
#include "pppr/kernels.hpp"
#include "pppr/random.hpp"

namespace pppr::diffusion {

namespace {

// Sub-stream tags so that different uses of one seed never share draws.
enum : std::uint64_t {
  kTagTrainIter = 1,
  kTagEval = 2,
  kTagReverse = 3,
  kTagMarginal = 4,
  kTagChain = 5,
  kTagTask = 6,
  kTagGradCheck = 7,
  kTagLossCheck = 8,
};

std::uint64_t derive(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  const std::uint64_t words[] = {seed, tag, index};
  return stream_hash(words);
}

double mean_of(const std::vector<double>& xs) {
  return kernels::pairwise_sum(xs) / static_cast<double>(xs.size());
}

void check_step(const NoiseSchedule& sched, int n) {
  require(n >= 1 && n <= sched.n_steps, "step " + std::to_string(n) + " outside [1, N]");
}

}  // namespace

// ---------------------------------------------------------------------------
// Schedule

NoiseSchedule schedule_from_betas(std::vector<double> betas) {
  require(!betas.empty(), "schedule needs at least one step");
  NoiseSchedule s;
  s.n_steps = static_cast<int>(betas.size());
  double prod = 1.0;
  for (double b : betas) {
    require(b > 0.0 && b < 1.0, "every beta must lie in (0, 1)");
    s.alphas.push_back(1.0 - b);
    prod *= 1.0 - b;
    s.alpha_bars.push_back(prod);
  }
  s.betas = std::move(betas);
  return s;
}

NoiseSchedule make_schedule(int n_steps, double beta_start, double beta_end) {
  require(n_steps >= 1, "schedule needs N >= 1");
  require(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0,
          "schedule needs 0 < beta_start <= beta_end < 1");
  std::vector<double> betas(static_cast<std::size_t>(n_steps));
  for (int k = 0; k < n_steps; ++k) {
    const double t = n_steps == 1 ? 0.0 : static_cast<double>(k) / (n_steps - 1);
    betas[static_cast<std::size_t>(k)] = beta_start + (beta_end - beta_start) * t;
  }
  return schedule_from_betas(std::move(betas));
}

// ---------------------------------------------------------------------------
// Forward process

Eigen::MatrixXd forward_marginal(const Eigen::MatrixXd& z0, double alpha_bar,
                                 const Eigen::MatrixXd& eps) {
  require(z0.rows() == eps.rows() && z0.cols() == eps.cols(), "forward_marginal shape mismatch");
  require(alpha_bar >= 0.0 && alpha_bar <= 1.0, "alpha_bar must lie in [0, 1]");
  return std::sqrt(alpha_bar) * z0 + std::sqrt(1.0 - alpha_bar) * eps;
}

Eigen::MatrixXd forward_marginal(const Eigen::MatrixXd& z0, int n, const Eigen::MatrixXd& eps,
                                 const NoiseSchedule& sched) {
  require(n >= 0 && n <= sched.n_steps, "step " + std::to_string(n) + " outside [0, N]");
  return forward_marginal(z0, sched.alpha_bar(n), eps);
}

Eigen::MatrixXd forward_step(const Eigen::MatrixXd& z_prev, double beta,
                             const Eigen::MatrixXd& noise) {
  require(z_prev.rows() == noise.rows() && z_prev.cols() == noise.cols(),
          "forward_step shape mismatch");
  require(beta >= 0.0 && beta <= 1.0, "beta must lie in [0, 1]");
  return std::sqrt(1.0 - beta) * z_prev + std::sqrt(beta) * noise;
}

Eigen::MatrixXd forward_step(const Eigen::MatrixXd& z_prev, int n, const NoiseSchedule& sched,
                             const Eigen::MatrixXd& noise) {
  check_step(sched, n);
  return forward_step(z_prev, sched.beta(n), noise);
}

Eigen::MatrixXd standard_normal(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Eigen::MatrixXd out(rows, cols);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < rows; ++i) {
    auto rng = make_stream(seed, static_cast<std::uint64_t>(i));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = normal(rng);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Loss

EpsilonFn zero_predictor() {
  return [](const Eigen::MatrixXd& z_n, std::span<const int>, const Eigen::MatrixXd&) {
    return Eigen::MatrixXd::Zero(z_n.rows(), z_n.cols()).eval();
  };
}

TrainingDraw draw_training(Eigen::Index rows, Eigen::Index dim, const NoiseSchedule& sched,
                           std::uint64_t seed) {
  TrainingDraw d;
  d.steps.resize(static_cast<std::size_t>(rows));
  d.eps.resize(rows, dim);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < rows; ++i) {
    auto rng = make_stream(seed, static_cast<std::uint64_t>(i));
    std::uniform_int_distribution<int> step(1, sched.n_steps);
    std::normal_distribution<double> normal(0.0, 1.0);
    d.steps[static_cast<std::size_t>(i)] = step(rng);
    for (Eigen::Index j = 0; j < dim; ++j) d.eps(i, j) = normal(rng);
  }
  return d;
}

namespace {

Eigen::MatrixXd noised(const LatentBatch& batch, const NoiseSchedule& sched,
                       const TrainingDraw& draw) {
  require(batch.z.rows() == batch.cond.rows(), "latent and condition row counts differ");
  require(draw.eps.rows() == batch.z.rows() && draw.eps.cols() == batch.z.cols() &&
              draw.steps.size() == static_cast<std::size_t>(batch.z.rows()),
          "training draw does not match the batch shape");
  Eigen::MatrixXd z_n(batch.z.rows(), batch.z.cols());
  for (Eigen::Index i = 0; i < z_n.rows(); ++i) {
    const int n = draw.steps[static_cast<std::size_t>(i)];
    check_step(sched, n);
    const double ab = sched.alpha_bar(n);
    z_n.row(i) = std::sqrt(ab) * batch.z.row(i) + std::sqrt(1.0 - ab) * draw.eps.row(i);
  }
  return z_n;
}

double mean_row_sq_norm(const Eigen::MatrixXd& r) {
  std::vector<double> per_row(static_cast<std::size_t>(r.rows()));
  for (Eigen::Index i = 0; i < r.rows(); ++i) per_row[static_cast<std::size_t>(i)] = r.row(i).squaredNorm();
  return mean_of(per_row);
}

}  // namespace

double training_loss(const EpsilonFn& pred, const LatentBatch& batch, const NoiseSchedule& sched,
                     const TrainingDraw& draw) {
  require(batch.z.rows() >= 1, "training_loss needs a nonempty batch");
  const Eigen::MatrixXd z_n = noised(batch, sched, draw);
  const Eigen::MatrixXd eps_hat = pred(z_n, draw.steps, batch.cond);
  require(eps_hat.rows() == z_n.rows() && eps_hat.cols() == z_n.cols(),
          "predictor output shape mismatch");
  return mean_row_sq_norm(draw.eps - eps_hat);
}

double training_loss(const EpsilonFn& pred, const LatentBatch& batch, const NoiseSchedule& sched,
                     std::uint64_t seed) {
  return training_loss(pred, batch, sched,
                       draw_training(batch.z.rows(), batch.z.cols(), sched, seed));
}

// ---------------------------------------------------------------------------
// Reverse process

Eigen::MatrixXd reverse_sample(const EpsilonFn& pred, const NoiseSchedule& sched,
                               const Eigen::MatrixXd& cond, Eigen::Index dim,
                               std::uint64_t seed) {
  require(dim >= 1, "reverse_sample needs dim >= 1");
  const Eigen::Index rows = cond.rows();
  const std::uint64_t base = derive(seed, kTagReverse, 0);
  std::vector<std::mt19937_64> rngs;
  rngs.reserve(static_cast<std::size_t>(rows));
  for (Eigen::Index i = 0; i < rows; ++i) rngs.push_back(make_stream(base, static_cast<std::uint64_t>(i)));
  auto draw = [&](Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      std::normal_distribution<double> normal(0.0, 1.0);
      for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = normal(rngs[static_cast<std::size_t>(i)]);
    }
  };

  Eigen::MatrixXd z(rows, dim);
  draw(z);
  Eigen::MatrixXd xi(rows, dim);
  for (int n = sched.n_steps; n >= 1; --n) {
    const std::vector<int> steps(static_cast<std::size_t>(rows), n);
    const Eigen::MatrixXd eps_hat = pred(z, steps, cond);
    require(eps_hat.rows() == rows && eps_hat.cols() == dim, "predictor output shape mismatch");
    const double beta = sched.beta(n);
    const double ab = sched.alpha_bar(n);
    z = (z - (beta / std::sqrt(1.0 - ab)) * eps_hat) / std::sqrt(sched.alpha(n));
    if (n > 1) {
      const double var = beta * (1.0 - sched.alpha_bar(n - 1)) / (1.0 - ab);
      draw(xi);
      z += std::sqrt(var) * xi;
    }
  }
  return z;
}

// ---------------------------------------------------------------------------
// Linear predictor

LinearPredictor LinearPredictor::zeros(Eigen::Index d, Eigen::Index c) {
  return {Eigen::MatrixXd::Zero(d, feature_dim(d, c))};
}

Eigen::MatrixXd LinearPredictor::features(const Eigen::MatrixXd& z_n, std::span<const int> steps,
                                          const Eigen::MatrixXd& cond,
                                          const NoiseSchedule& sched) const {
  const Eigen::Index b = z_n.rows(), d = z_n.cols(), c = cond.rows() == b ? cond.cols() : -1;
  require(c >= 0 && steps.size() == static_cast<std::size_t>(b), "predictor input shape mismatch");
  require(weights.rows() == d && weights.cols() == feature_dim(d, c),
          "predictor weights do not match the input dimensions");
  Eigen::MatrixXd f(b, feature_dim(d, c));
  for (Eigen::Index i = 0; i < b; ++i) {
    const int n = steps[static_cast<std::size_t>(i)];
    check_step(sched, n);
    const double s = std::sqrt(sched.alpha_bar(n));
    const double t = std::sqrt(1.0 - sched.alpha_bar(n));
    f.row(i).segment(0, d) = z_n.row(i);
    f.row(i).segment(d, c) = cond.row(i);
    f(i, d + c) = s;
    f(i, d + c + 1) = t;
    f(i, d + c + 2) = 1.0;
    f.row(i).segment(d + c + 3, d) = s * z_n.row(i);
    f.row(i).segment(2 * d + c + 3, c) = s * cond.row(i);
  }
  return f;
}

Eigen::MatrixXd LinearPredictor::predict(const Eigen::MatrixXd& z_n, std::span<const int> steps,
                                         const Eigen::MatrixXd& cond,
                                         const NoiseSchedule& sched) const {
  return features(z_n, steps, cond, sched) * weights.transpose();
}

EpsilonFn LinearPredictor::as_fn(const NoiseSchedule& sched) const {
  return [self = *this, sched](const Eigen::MatrixXd& z_n, std::span<const int> steps,
                               const Eigen::MatrixXd& cond) {
    return self.predict(z_n, steps, cond, sched);
  };
}

LossAndGradient loss_and_gradient(const LinearPredictor& p, const LatentBatch& batch,
                                  const NoiseSchedule& sched, const TrainingDraw& draw) {
  require(batch.z.rows() >= 1, "loss_and_gradient needs a nonempty batch");
  const Eigen::MatrixXd z_n = noised(batch, sched, draw);
  const Eigen::MatrixXd f = p.features(z_n, draw.steps, batch.cond, sched);
  const Eigen::MatrixXd resid = draw.eps - f * p.weights.transpose();
  LossAndGradient out;
  out.loss = mean_row_sq_norm(resid);
  out.gradient = (-2.0 / static_cast<double>(batch.z.rows())) * resid.transpose() * f;
  return out;
}

FitResult fit_linear_predictor(const LatentBatch& data, const NoiseSchedule& sched,
                               const FitOptions& opts) {
  require(data.z.rows() >= 1, "fit_linear_predictor needs a nonempty dataset");
  require(opts.iterations >= 0, "iterations must be non-negative");
  require(opts.learning_rate >= 0.0, "learning_rate must be non-negative");
  FitResult r;
  r.predictor = LinearPredictor::zeros(data.z.cols(), data.cond.cols());
  const TrainingDraw eval =
      draw_training(data.z.rows(), data.z.cols(), sched, derive(opts.seed, kTagEval, 0));
  auto record = [&](int iteration) {
    const double loss = loss_and_gradient(r.predictor, data, sched, eval).loss;
    if (!std::isfinite(loss)) throw DivergenceError("non-finite training loss", static_cast<std::size_t>(iteration));
    r.loss_history.push_back(loss);
  };
  record(0);
  for (int it = 1; it <= opts.iterations; ++it) {
    const TrainingDraw draw =
        draw_training(data.z.rows(), data.z.cols(), sched,
                      derive(opts.seed, kTagTrainIter, static_cast<std::uint64_t>(it)));
    const LossAndGradient lg = loss_and_gradient(r.predictor, data, sched, draw);
    if (!std::isfinite(lg.loss) || !lg.gradient.allFinite()) {
      throw DivergenceError("non-finite training loss", static_cast<std::size_t>(it));
    }
    r.predictor.weights -= opts.learning_rate * lg.gradient;
    record(it);
  }
  return r;
}

LatentBatch make_synthetic_task(Eigen::Index samples, Eigen::Index dim, Eigen::Index cond_dim,
                                std::uint64_t seed) {
  require(samples >= 1 && dim >= 1 && cond_dim >= 1, "synthetic task needs positive sizes");
  LatentBatch b;
  b.cond = standard_normal(samples, cond_dim, derive(seed, kTagTask, 0));
  const Eigen::MatrixXd map =
      standard_normal(dim, cond_dim, derive(seed, kTagTask, 1)) / std::sqrt(static_cast<double>(cond_dim));
  b.z = b.cond * map.transpose();
  return b;
}

GradientCheck check_gradient(const LatentBatch& batch, const NoiseSchedule& sched,
                             std::uint64_t seed, int trials, double step) {
  require(trials >= 1 && step > 0.0, "gradient check needs trials >= 1 and step > 0");
  const Eigen::Index d = batch.z.cols(), c = batch.cond.cols();
  const Eigen::Index width = LinearPredictor::feature_dim(d, c);
  GradientCheck out;
  out.trials = trials;
  for (int t = 0; t < trials; ++t) {
    const auto tt = static_cast<std::uint64_t>(t);
    LinearPredictor p{standard_normal(d, width, derive(seed, kTagGradCheck, 3 * tt)) * 0.5};
    const Eigen::MatrixXd dir = standard_normal(d, width, derive(seed, kTagGradCheck, 3 * tt + 1));
    const TrainingDraw draw =
        draw_training(batch.z.rows(), d, sched, derive(seed, kTagGradCheck, 3 * tt + 2));
    const double analytic = loss_and_gradient(p, batch, sched, draw).gradient.cwiseProduct(dir).sum();
    LinearPredictor plus{p.weights + step * dir}, minus{p.weights - step * dir};
    const double numeric = (loss_and_gradient(plus, batch, sched, draw).loss -
                            loss_and_gradient(minus, batch, sched, draw).loss) /
                           (2.0 * step);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-12});
    out.max_relative_error = std::max(out.max_relative_error, std::abs(analytic - numeric) / denom);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Monte-Carlo checks

Moments sample_moments(const Eigen::MatrixXd& samples) {
  require(samples.rows() >= 2, "moments need at least two samples");
  Moments m;
  m.mean.resize(samples.cols());
  m.var.resize(samples.cols());
  std::vector<double> col(static_cast<std::size_t>(samples.rows()));
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    for (Eigen::Index i = 0; i < samples.rows(); ++i) col[static_cast<std::size_t>(i)] = samples(i, j);
    m.mean(j) = mean_of(col);
    for (auto& x : col) x = (x - m.mean(j)) * (x - m.mean(j));
    m.var(j) = kernels::pairwise_sum(col) / static_cast<double>(samples.rows() - 1);
  }
  return m;
}

MomentComparison compare_forward_moments(const NoiseSchedule& sched, int n,
                                         const Eigen::VectorXd& z0, Eigen::Index draws,
                                         std::uint64_t seed) {
  check_step(sched, n);
  require(draws >= 2, "moment comparison needs at least two draws");
  const Eigen::Index d = z0.size();
  const Eigen::MatrixXd z0_rows = z0.transpose().replicate(draws, 1);
  const auto nn = static_cast<std::uint64_t>(n);
  const Eigen::MatrixXd closed = forward_marginal(
      z0_rows, n, standard_normal(draws, d, derive(seed, kTagMarginal, nn)), sched);

  std::vector<double> chain(static_cast<std::size_t>(draws * d));
  kernels::forward_chain_parallel(std::span<const double>(z0.data(), static_cast<std::size_t>(d)),
                                  sched.betas, static_cast<std::size_t>(n),
                                  static_cast<std::size_t>(draws), derive(seed, kTagChain, nn),
                                  chain);
  const Eigen::MatrixXd iterated =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          chain.data(), draws, d);

  MomentComparison out;
  out.step = n;
  out.closed_form = sample_moments(closed);
  out.iterated = sample_moments(iterated);
  const double nd = static_cast<double>(draws);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double v1 = out.closed_form.var(j), v2 = out.iterated.var(j);
    const double se_mean = std::sqrt(v1 / nd + v2 / nd);
    const double se_var = std::sqrt(2.0 / (nd - 1.0)) * std::sqrt(v1 * v1 + v2 * v2);
    out.max_mean_z = std::max(out.max_mean_z,
                              std::abs(out.closed_form.mean(j) - out.iterated.mean(j)) / se_mean);
    out.max_var_z = std::max(out.max_var_z, std::abs(v1 - v2) / se_var);
  }
  out.passed = out.max_mean_z <= 3.0 && out.max_var_z <= 3.0;
  return out;
}

// ---------------------------------------------------------------------------
// Report

void validate(const SandboxConfig& cfg) {
  if (cfg.dim < 1) throw ConfigError("sandbox dim must be positive");
  if (cfg.cond_dim < 1) throw ConfigError("sandbox cond_dim must be positive");
  if (cfg.n_steps < 1) throw ConfigError("sandbox n_steps must be positive");
  if (cfg.iterations < 0) throw ConfigError("sandbox iterations must be non-negative");
  if (!(cfg.learning_rate >= 0.0)) throw ConfigError("sandbox learning_rate must be non-negative");
  if (cfg.samples < 1) throw ConfigError("sandbox samples must be positive");
  if (cfg.mc_draws < 2) throw ConfigError("sandbox mc_draws must be at least 2");
}

namespace {

nlohmann::ordered_json to_json(const Eigen::VectorXd& v) {
  return nlohmann::ordered_json(std::vector<double>(v.data(), v.data() + v.size()));
}

nlohmann::ordered_json to_json(const Moments& m) {
  return {{"mean", to_json(m.mean)}, {"var", to_json(m.var)}};
}

template <typename F>
bool strictly_decreasing(int n, F value) {
  for (int k = 2; k <= n; ++k) {
    if (!(value(k) < value(k - 1))) return false;
  }
  return true;
}

}  // namespace

nlohmann::ordered_json run_sandbox(const SandboxConfig& cfg) {
  validate(cfg);
  const NoiseSchedule sched = make_schedule(cfg.n_steps);
  bool all_passed = true;
  nlohmann::ordered_json report;

  nlohmann::ordered_json conf;
  conf["dim"] = cfg.dim;
  conf["cond_dim"] = cfg.cond_dim;
  conf["n_steps"] = cfg.n_steps;
  conf["iterations"] = cfg.iterations;
  conf["learning_rate"] = cfg.learning_rate;
  conf["samples"] = cfg.samples;
  conf["mc_draws"] = cfg.mc_draws;
  conf["seed"] = cfg.seed;
  report["config"] = conf;

  const bool ab_dec = strictly_decreasing(sched.n_steps, [&](int n) { return sched.alpha_bar(n); });
  const bool snr_dec = strictly_decreasing(sched.n_steps, [&](int n) {
    return sched.alpha_bar(n) / (1.0 - sched.alpha_bar(n));
  });
  nlohmann::ordered_json sj;
  sj["n_steps"] = sched.n_steps;
  sj["beta_first"] = sched.betas.front();
  sj["beta_last"] = sched.betas.back();
  sj["alpha_bar_final"] = sched.alpha_bars.back();
  sj["alpha_bar_strictly_decreasing"] = ab_dec;
  sj["snr_strictly_decreasing"] = snr_dec;
  report["schedule"] = sj;
  all_passed = all_passed && ab_dec && snr_dec;

  // Closed-form vs iterated noising from a fixed bounded z0 (d = 2).
  Eigen::VectorXd z0(2);
  z0 << 1.0, -0.5;
  std::vector<int> check_steps;
  for (int n : {10, 100, sched.n_steps}) {
    if (n <= sched.n_steps &&
        std::find(check_steps.begin(), check_steps.end(), n) == check_steps.end()) {
      check_steps.push_back(n);
    }
  }
  nlohmann::ordered_json moments = nlohmann::ordered_json::array();
  MomentComparison last;
  for (int n : check_steps) {
    last = compare_forward_moments(sched, n, z0, cfg.mc_draws, cfg.seed);
    moments.push_back({{"step", n},
                       {"closed_form", to_json(last.closed_form)},
                       {"iterated", to_json(last.iterated)},
                       {"max_mean_z", last.max_mean_z},
                       {"max_var_z", last.max_var_z},
                       {"passed", last.passed}});
    all_passed = all_passed && last.passed;
  }
  report["forward_moments"] = moments;

  if (sched.n_steps >= 1000) {
    const bool ok = (last.iterated.mean.array().abs() <= 0.02).all() &&
                    ((last.iterated.var.array() - 1.0).abs() <= 0.05).all();
    report["convergence"] = {{"step", sched.n_steps},
                             {"mean", to_json(last.iterated.mean)},
                             {"var", to_json(last.iterated.var)},
                             {"passed", ok}};
    all_passed = all_passed && ok;
  }

  // Loss checks.
  {
    const Eigen::Index rows = std::max<Eigen::Index>(2, cfg.mc_draws / cfg.dim);
    const LatentBatch big = make_synthetic_task(rows, cfg.dim, cfg.cond_dim, cfg.seed);
    const std::uint64_t s = derive(cfg.seed, kTagLossCheck, 0);
    const TrainingDraw draw = draw_training(rows, cfg.dim, sched, s);
    const EpsilonFn oracle = [&draw](const Eigen::MatrixXd&, std::span<const int>,
                                     const Eigen::MatrixXd&) { return draw.eps; };
    const double oracle_loss = training_loss(oracle, big, sched, draw);
    const double zero_loss = training_loss(zero_predictor(), big, sched, draw);
    const double zero_again = training_loss(zero_predictor(), big, sched, s);
    const double se = std::sqrt(2.0 * cfg.dim / static_cast<double>(rows));
    const bool zero_ok = std::abs(zero_loss - cfg.dim) <= 3.0 * se;
    nlohmann::ordered_json lj;
    lj["oracle_loss"] = oracle_loss;
    lj["zero_predictor_loss"] = zero_loss;
    lj["zero_predictor_expected"] = cfg.dim;
    lj["zero_predictor_standard_error"] = se;
    lj["deterministic"] = zero_loss == zero_again;
    lj["passed"] = oracle_loss == 0.0 && zero_ok && zero_loss == zero_again;
    all_passed = all_passed && lj["passed"].get<bool>();
    report["loss_checks"] = lj;
  }

  // Training and gradient check on the synthetic task.
  const LatentBatch task = make_synthetic_task(cfg.samples, cfg.dim, cfg.cond_dim, cfg.seed);
  const FitResult fit =
      fit_linear_predictor(task, sched, {cfg.iterations, cfg.learning_rate, cfg.seed});
  {
    nlohmann::ordered_json tj;
    const double first = fit.loss_history.front(), last_loss = fit.loss_history.back();
    tj["initial_loss"] = first;
    tj["final_loss"] = last_loss;
    tj["ratio"] = last_loss / first;
    tj["halved"] = last_loss < 0.5 * first;
    tj["loss_history"] = fit.loss_history;
    all_passed = all_passed && (cfg.iterations == 0 || last_loss < 0.5 * first);
    report["training"] = tj;
  }
  {
    const GradientCheck gc = check_gradient(task, sched, cfg.seed);
    report["gradient_check"] = {{"trials", gc.trials},
                                {"max_relative_error", gc.max_relative_error},
                                {"passed", gc.max_relative_error <= 1e-4}};
    all_passed = all_passed && gc.max_relative_error <= 1e-4;
  }
  {
    const EpsilonFn pred = fit.predictor.as_fn(sched);
    const Eigen::MatrixXd a = reverse_sample(pred, sched, task.cond, cfg.dim, cfg.seed);
    const Eigen::MatrixXd b = reverse_sample(pred, sched, task.cond, cfg.dim, cfg.seed);
    const Eigen::MatrixXd z = reverse_sample(zero_predictor(), sched, task.cond, cfg.dim, cfg.seed);
    const bool ok = a.allFinite() && z.allFinite() && a == b;
    report["reverse"] = {{"finite", a.allFinite() && z.allFinite()},
                         {"deterministic", a == b},
                         {"zero_predictor_variance", to_json(sample_moments(z).var)},
                         {"passed", ok}};
    all_passed = all_passed && ok;
  }
  report["passed"] = all_passed;
  return report;
}

}  // namespace pppr::diffusion
