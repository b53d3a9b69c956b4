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

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "pppr/audio_features.hpp"
#include "pppr/diffusion_sandbox.hpp"
#include "pppr/kernels.hpp"

namespace {

using namespace pppr;

std::vector<double> noise(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

template <bool Parallel>
void BM_Resample(benchmark::State& state) {
  const auto plan = kernels::make_resample_plan(44100, 16000);
  const auto in = noise(44100 * 10);
  std::vector<double> out(plan.output_length(in.size()));
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::resample_parallel(plan, in, out);
    } else {
      kernels::resample_serial(plan, in, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_LogMel(benchmark::State& state) {
  const FeatureParams p;
  const auto plan = make_mel_plan(p);
  const auto padded = noise(p.clip_samples() + static_cast<std::size_t>(p.n_fft));
  std::vector<double> out(static_cast<std::size_t>(plan.n_mels) * plan.n_frames);
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::log_mel_parallel(plan, padded, out);
    } else {
      kernels::log_mel_serial(plan, padded, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_Covariance(benchmark::State& state) {
  const auto n = state.range(0);
  const auto v = noise(static_cast<std::size_t>(n * 128));
  const Eigen::MatrixXd x = Eigen::Map<const Eigen::MatrixXd>(v.data(), n, 128);
  const Eigen::VectorXd mean = x.colwise().mean();
  for (auto _ : state) {
    Eigen::MatrixXd c = Parallel ? kernels::covariance_parallel(x, mean)
                                 : kernels::covariance_serial(x, mean);
    benchmark::DoNotOptimize(c.data());
  }
}

template <bool Parallel>
void BM_RowKl(benchmark::State& state) {
  const auto v = noise(20000 * 527);
  Eigen::MatrixXd p = Eigen::Map<const Eigen::MatrixXd>(v.data(), 20000, 527).cwiseAbs();
  for (Eigen::Index i = 0; i < p.rows(); ++i) p.row(i) /= p.row(i).sum();
  const Eigen::VectorXd q = p.colwise().mean();
  for (auto _ : state) {
    auto kl = Parallel ? kernels::row_kl_parallel(p, q) : kernels::row_kl_serial(p, q);
    benchmark::DoNotOptimize(kl.data());
  }
}

template <bool Parallel>
void BM_ForwardChain(benchmark::State& state) {
  const auto sched = diffusion::make_schedule(100);
  const std::vector<double> z0 = {1.0, -1.0, 0.5, 2.0};
  const auto samples = static_cast<std::size_t>(state.range(0));
  std::vector<double> out(samples * z0.size());
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::forward_chain_parallel(z0, sched.betas, 100, samples, 3, out);
    } else {
      kernels::forward_chain_serial(z0, sched.betas, 100, samples, 3, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

BENCHMARK(BM_Resample<false>)->Name("resample/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Resample<true>)->Name("resample/parallel")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_LogMel<false>)->Name("log_mel/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LogMel<true>)->Name("log_mel/parallel")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Covariance<false>)->Name("covariance/serial")->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Covariance<true>)->Name("covariance/parallel")->Arg(4000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RowKl<false>)->Name("row_kl/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RowKl<true>)->Name("row_kl/parallel")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ForwardChain<false>)->Name("forward_chain/serial")->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForwardChain<true>)->Name("forward_chain/parallel")->Arg(20000)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
