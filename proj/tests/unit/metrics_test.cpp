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

#include "pppr/error.hpp"
#include "pppr/metrics.hpp"
#include "support.hpp"

namespace pppr {
namespace {

GaussianStats gauss1(double mean, double var) {
  GaussianStats g;
  g.mean = Eigen::VectorXd::Constant(1, mean);
  g.cov = Eigen::MatrixXd::Constant(1, 1, var);
  return g;
}

ProbMatrix probs(std::vector<std::string> ids, std::initializer_list<std::vector<double>> rows) {
  ProbMatrix p;
  p.ids = std::move(ids);
  p.rows.resize(static_cast<Eigen::Index>(rows.size()),
                static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < r.size(); ++j) p.rows(i, static_cast<Eigen::Index>(j)) = r[j];
    ++i;
  }
  return p;
}

TEST(FitGaussian, SmallExample) {
  Eigen::MatrixXd x(3, 2);
  x << 1, 2, 3, 4, 5, 9;
  const auto g = fit_gaussian(x);
  EXPECT_NEAR(g.mean(0), 3.0, 1e-15);
  EXPECT_NEAR(g.mean(1), 5.0, 1e-15);
  EXPECT_NEAR(g.cov(0, 0), 4.0, 1e-14);
  EXPECT_NEAR(g.cov(1, 1), 13.0, 1e-14);
  EXPECT_NEAR(g.cov(0, 1), 7.0, 1e-14);
  EXPECT_THROW(fit_gaussian(Eigen::MatrixXd::Ones(1, 2)), ContractViolation);
  EmbeddingMatrix e{{"a", "b"}, Eigen::MatrixXd::Zero(3, 2)};
  EXPECT_THROW(fit_gaussian(e), ValidationError);
}

TEST(MatrixSqrt, Examples) {
  Eigen::MatrixXd d = Eigen::Vector3d(4, 9, 0).asDiagonal();
  EXPECT_TRUE(matrix_sqrt_psd(d).isApprox(Eigen::MatrixXd(Eigen::Vector3d(2, 3, 0).asDiagonal())));
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0, 1);
  Eigen::MatrixXd a(5, 5);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = n(rng);
  const Eigen::MatrixXd spd = a * a.transpose();
  const Eigen::MatrixXd r = matrix_sqrt_psd(spd);
  EXPECT_LT((r * r - spd).norm() / spd.norm(), 1e-12);
  Eigen::MatrixXd asym = spd;
  asym(0, 1) += 1.0;
  EXPECT_THROW(matrix_sqrt_psd(asym), ContractViolation);
}

TEST(Frechet, OneDimensionalClosedForm) {
  EXPECT_DOUBLE_EQ(frechet_distance(gauss1(0, 1), gauss1(0, 1)), 0.0);
  EXPECT_NEAR(frechet_distance(gauss1(0, 1), gauss1(3, 1)), 9.0, 1e-12);
  EXPECT_NEAR(frechet_distance(gauss1(1, 4), gauss1(-1, 9)), 4.0 + 1.0, 1e-12);
  EXPECT_NEAR(frechet_distance(gauss1(0, 0), gauss1(0, 4)), 4.0, 1e-12);
}

TEST(Frechet, DimensionMismatchIsContractViolation) {
  GaussianStats g2;
  g2.mean = Eigen::VectorXd::Zero(2);
  g2.cov = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_THROW(frechet_distance(gauss1(0, 1), g2), ContractViolation);
}

TEST(Frechet, DiagonalCovariances) {
  GaussianStats a, b;
  a.mean = Eigen::Vector3d(0, 0, 0);
  b.mean = Eigen::Vector3d(1, 2, 2);
  a.cov = Eigen::Vector3d(1, 4, 9).asDiagonal();
  b.cov = Eigen::Vector3d(4, 4, 1).asDiagonal();
  // (1+4+4) + (1-2)^2 + 0 + (3-1)^2
  EXPECT_NEAR(frechet_distance(a, b), 9.0 + 1.0 + 0.0 + 4.0, 1e-10);
}

TEST(Inception, UniformAndOneHot) {
  const auto same = probs({"a", "b", "c"}, {{0.2, 0.8}, {0.2, 0.8}, {0.2, 0.8}});
  EXPECT_NEAR(inception_score(same).mean, 1.0, 1e-12);
  const auto onehot =
      probs({"a", "b", "c", "d"}, {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}});
  EXPECT_NEAR(inception_score(onehot).mean, 4.0, 1e-12);
  const auto two = probs({"a", "b"}, {{1, 0}, {0, 1}});
  EXPECT_NEAR(inception_score(two).mean, 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(inception_score(two).std, 0.0);
  const auto s = inception_score(onehot, 2);
  EXPECT_NEAR(s.mean, 2.0, 1e-12);
  EXPECT_THROW(inception_score(two, 3), ContractViolation);
}

TEST(Inception, RejectsNonSimplexRows) {
  EXPECT_THROW(inception_score(probs({"a"}, {{0.5, 0.6}})), DataError);
  EXPECT_THROW(inception_score(probs({"a"}, {{-0.1, 1.1}})), DataError);
}

TEST(PairedKl, ClosedFormAndDirection) {
  const auto gen = probs({"x", "y"}, {{0.8, 0.2}, {0.5, 0.5}});
  const auto ref = probs({"y", "x"}, {{0.5, 0.5}, {0.5, 0.5}});
  const double ref_gen = 0.5 * (0.5 * std::log(0.5 / 0.8) + 0.5 * std::log(0.5 / 0.2));
  const double gen_ref = 0.5 * (0.8 * std::log(0.8 / 0.5) + 0.2 * std::log(0.2 / 0.5));
  EXPECT_NEAR(paired_kl(gen, ref), ref_gen, 1e-12);
  EXPECT_NEAR(paired_kl(gen, ref, KlDirection::kGenRef), gen_ref, 1e-12);
  EXPECT_EQ(parse_kl_direction("gen-ref"), KlDirection::kGenRef);
  EXPECT_EQ(to_string(KlDirection::kRefGen), "ref-gen");
  EXPECT_THROW(parse_kl_direction("both"), ConfigError);
}

TEST(PairedKl, ZeroMassUsesFloor) {
  const auto gen = probs({"x"}, {{1.0, 0.0}});
  const auto ref = probs({"x"}, {{0.5, 0.5}});
  const double v = paired_kl(gen, ref);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, 0.5 * std::log(0.5) + 0.5 * std::log(0.5 / 1e-12), 1e-9);
}

TEST(PairedKl, PairingErrors) {
  const auto a = probs({"x", "y"}, {{1, 0}, {0, 1}});
  EXPECT_THROW(paired_kl(a, probs({"x"}, {{1, 0}})), PairingError);
  EXPECT_THROW(paired_kl(a, probs({"x", "z"}, {{1, 0}, {0, 1}})), PairingError);
  EXPECT_THROW(paired_kl(probs({"x", "x"}, {{1, 0}, {0, 1}}), a), PairingError);
}

TEST(Featbin, RoundTripBothKinds) {
  testing::TempDir dir;
  EmbeddingMatrix e{{"a", "bb", ""}, Eigen::MatrixXd(3, 2)};
  e.rows << 1.5, -2, 0.25, 3, 1e3, -1e-3;
  save_features(dir / "e.featbin", e);
  const auto back = load_embeddings(dir / "e.featbin");
  EXPECT_EQ(back.ids, e.ids);
  EXPECT_TRUE(back.rows.isApprox(e.rows.cast<float>().cast<double>(), 0.0));

  const auto p = probs({"a", "b"}, {{0.1, 0.2, 0.7}, {1.0 / 3, 1.0 / 3, 1.0 / 3}});
  save_features(dir / "p.featbin", p);
  const auto pb = load_probabilities(dir / "p.featbin");
  for (Eigen::Index i = 0; i < 2; ++i) EXPECT_NEAR(pb.rows.row(i).sum(), 1.0, 1e-15);
  EXPECT_LT((pb.rows - p.rows).cwiseAbs().maxCoeff(), 1e-7);
  EXPECT_THROW(load_probabilities(dir / "e.featbin"), FormatError);
  EXPECT_THROW(load_embeddings(dir / "p.featbin"), FormatError);
}

TEST(Featbin, CorruptInputs) {
  EmbeddingMatrix e{{"a"}, Eigen::MatrixXd::Ones(1, 4)};
  const std::string bytes = encode_features(e);
  EXPECT_EQ(bytes.substr(0, 8), "PPPRFEAT");
  EXPECT_THROW(decode_features(bytes.substr(0, bytes.size() - 2)), FormatError);
  EXPECT_THROW(decode_features(bytes + "x"), FormatError);
  std::string bad_kind = bytes;
  bad_kind[8] = 7;
  EXPECT_THROW(decode_features(bad_kind), FormatError);
  std::string huge = bytes;
  huge[9 + 7] = 0x7f;  // high byte of n
  EXPECT_THROW(decode_features(huge), FormatError);
}

TEST(Featbin, ManyIds) {
  const Eigen::Index n = 2240;
  ProbMatrix p{{}, Eigen::MatrixXd::Constant(n, 527, 1.0 / 527)};
  for (Eigen::Index i = 0; i < n; ++i) p.ids.push_back(testing::synthetic_clip_id(i));
  const auto back = std::get<ProbMatrix>(decode_features(encode_features(p)));
  EXPECT_EQ(back.ids, p.ids);
  EXPECT_EQ(back.rows.rows(), n);
  EXPECT_NEAR(paired_kl(back, p), 0.0, 1e-12);
}

}  // namespace
}  // namespace pppr
