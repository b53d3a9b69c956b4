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

#include "pppr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "binary_io.hpp"
#include "pppr/error.hpp"
#include "pppr/kernels.hpp"

namespace pppr {

namespace {

void check_ids(const std::vector<std::string>& ids, Eigen::Index rows) {
  if (static_cast<Eigen::Index>(ids.size()) != rows) {
    throw ValidationError("id count " + std::to_string(ids.size()) + " does not match row count " +
                          std::to_string(rows));
  }
}

double mean_of(const std::vector<double>& xs) {
  return kernels::pairwise_sum(xs) / static_cast<double>(xs.size());
}

}  // namespace

void validate(const EmbeddingMatrix& e) {
  check_ids(e.ids, e.rows.rows());
  for (Eigen::Index i = 0; i < e.rows.rows(); ++i) {
    if (!e.rows.row(i).allFinite()) {
      throw DataError("embedding row " + std::to_string(i) + " (" + e.ids[i] + ") is not finite");
    }
  }
}

void validate(const ProbMatrix& p, double tolerance) {
  check_ids(p.ids, p.rows.rows());
  require(p.rows.cols() >= 1, "probability matrix needs at least one class");
  for (Eigen::Index i = 0; i < p.rows.rows(); ++i) {
    const auto row = p.rows.row(i);
    const std::string name = "probability row " + std::to_string(i) + " (" + p.ids[i] + ")";
    if (!row.allFinite()) throw DataError(name + " is not finite");
    if (row.minCoeff() < 0.0 || row.maxCoeff() > 1.0) {
      throw DataError(name + " has entries outside [0, 1]");
    }
    const double sum = row.sum();
    if (std::abs(sum - 1.0) > tolerance) {
      throw DataError(name + " sums to " + std::to_string(sum));
    }
  }
}

// ---------------------------------------------------------------------------
// Frechet distance

GaussianStats fit_gaussian(const Eigen::MatrixXd& rows) {
  require(rows.rows() >= 2, "fit_gaussian needs at least two rows");
  require(rows.allFinite(), "fit_gaussian needs finite rows");
  GaussianStats g;
  g.mean.resize(rows.cols());
  for (Eigen::Index j = 0; j < rows.cols(); ++j) {
    std::vector<double> col(rows.col(j).data(), rows.col(j).data() + rows.rows());
    g.mean(j) = mean_of(col);
  }
  g.cov = kernels::covariance_parallel(rows, g.mean);
  return g;
}

GaussianStats fit_gaussian(const EmbeddingMatrix& e) {
  validate(e);
  return fit_gaussian(e.rows);
}

Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& m) {
  require(m.rows() == m.cols(), "matrix_sqrt_psd needs a square matrix");
  require(m.allFinite(), "matrix_sqrt_psd needs a finite matrix");
  const double scale = 1.0 + m.norm();
  require((m - m.transpose()).norm() <= 1e-9 * scale, "matrix_sqrt_psd needs a symmetric matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success) throw NumericError("eigendecomposition did not converge");
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd r = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (r + r.transpose());
}

namespace {

// Tr sqrtm(A B) for PSD A, B, via the symmetric form sqrt(A) B sqrt(A).
double trace_sqrt_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::MatrixXd sa = matrix_sqrt_psd(a);
  Eigen::MatrixXd inner = sa * b * sa;
  inner = 0.5 * (inner + inner.transpose());
  return matrix_sqrt_psd(inner).trace();
}

}  // namespace

double frechet_distance(const GaussianStats& a, const GaussianStats& b, double jitter) {
  require(a.mean.size() == b.mean.size() && a.cov.rows() == b.cov.rows() &&
              a.cov.cols() == b.cov.cols() && a.cov.rows() == a.mean.size(),
          "frechet_distance dimension mismatch");
  if (a.mean == b.mean && a.cov == b.cov) return 0.0;
  const double mean_term = (a.mean - b.mean).squaredNorm();
  double tr = 0.0;
  try {
    tr = trace_sqrt_product(a.cov, b.cov);
  } catch (const NumericError&) {
    tr = std::nan("");
  }
  if (!std::isfinite(tr)) {
    const auto eye = Eigen::MatrixXd::Identity(a.cov.rows(), a.cov.cols());
    tr = trace_sqrt_product(a.cov + jitter * eye, b.cov + jitter * eye);
    if (!std::isfinite(tr)) throw NumericError("covariance product square root is not finite");
  }
  const double fd = mean_term + a.cov.trace() + b.cov.trace() - 2.0 * tr;
  return std::max(0.0, fd);
}

// ---------------------------------------------------------------------------
// Inception score

InceptionScore inception_score(const ProbMatrix& p, int splits) {
  validate(p);
  const Eigen::Index n = p.rows.rows();
  require(splits >= 1 && n >= splits, "inception_score needs 1 <= splits <= rows");
  std::vector<double> scores;
  for (int s = 0; s < splits; ++s) {
    const Eigen::Index lo = n * s / splits, hi = n * (s + 1) / splits;
    const Eigen::MatrixXd chunk = p.rows.middleRows(lo, hi - lo);
    Eigen::VectorXd marginal(chunk.cols());
    for (Eigen::Index c = 0; c < chunk.cols(); ++c) {
      std::vector<double> col(chunk.col(c).data(), chunk.col(c).data() + chunk.rows());
      marginal(c) = mean_of(col);
    }
    auto kl = kernels::row_kl_parallel(chunk, marginal);
    for (double& k : kl) k = std::max(0.0, k);
    const double score = std::exp(mean_of(kl));
    scores.push_back(std::clamp(score, 1.0, static_cast<double>(p.rows.cols())));
  }
  InceptionScore out;
  out.mean = mean_of(scores);
  double var = 0.0;
  for (double s : scores) var += (s - out.mean) * (s - out.mean);
  out.std = std::sqrt(var / static_cast<double>(scores.size()));
  return out;
}

// ---------------------------------------------------------------------------
// Paired KL

std::string_view to_string(KlDirection d) {
  return d == KlDirection::kRefGen ? "ref-gen" : "gen-ref";
}

KlDirection parse_kl_direction(std::string_view s) {
  if (s == "ref-gen") return KlDirection::kRefGen;
  if (s == "gen-ref") return KlDirection::kGenRef;
  throw ConfigError("unknown KL direction '" + std::string(s) + "' (expected ref-gen or gen-ref)");
}

namespace {

std::unordered_map<std::string, Eigen::Index> index_ids(const ProbMatrix& m, const char* which) {
  std::unordered_map<std::string, Eigen::Index> idx;
  for (std::size_t i = 0; i < m.ids.size(); ++i) {
    if (!idx.emplace(m.ids[i], static_cast<Eigen::Index>(i)).second) {
      throw PairingError(std::string("duplicate clip_id '") + m.ids[i] + "' in " + which);
    }
  }
  return idx;
}

}  // namespace

double paired_kl(const ProbMatrix& gen, const ProbMatrix& ref, KlDirection direction) {
  validate(gen);
  validate(ref);
  require(gen.rows.cols() == ref.rows.cols(), "paired_kl class count mismatch");
  const auto gen_idx = index_ids(gen, "gen");
  index_ids(ref, "ref");
  if (gen.ids.size() != ref.ids.size()) {
    throw PairingError("gen has " + std::to_string(gen.ids.size()) + " clips, ref has " +
                       std::to_string(ref.ids.size()));
  }
  require(!ref.ids.empty(), "paired_kl needs at least one pair");
  std::vector<Eigen::Index> partner(ref.ids.size());
  for (std::size_t i = 0; i < ref.ids.size(); ++i) {
    auto it = gen_idx.find(ref.ids[i]);
    if (it == gen_idx.end()) throw PairingError("clip_id '" + ref.ids[i] + "' has no gen pair");
    partner[i] = it->second;
  }
  std::vector<double> terms(ref.ids.size());
  const Eigen::Index classes = ref.rows.cols();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto r = ref.rows.row(static_cast<Eigen::Index>(i));
    const auto g = gen.rows.row(partner[i]);
    double s = 0.0;
    for (Eigen::Index c = 0; c < classes; ++c) {
      const double p = direction == KlDirection::kRefGen ? r(c) : g(c);
      const double q = direction == KlDirection::kRefGen ? g(c) : r(c);
      if (p > 0.0) s += p * std::log(p / std::max(q, kProbabilityFloor));
    }
    terms[i] = std::max(0.0, s);
  }
  return mean_of(terms);
}

// ---------------------------------------------------------------------------
// .featbin

namespace {

constexpr std::string_view kFeatMagic = "PPPRFEAT";

template <typename M>
std::string encode_matrix(const M& m, FeatureKind kind) {
  check_ids(m.ids, m.rows.rows());
  std::string out(kFeatMagic);
  binio::put<std::uint8_t>(out, static_cast<std::uint8_t>(kind));
  binio::put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows.rows()));
  binio::put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows.cols()));
  for (const auto& id : m.ids) {
    binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(id.size()));
    out += id;
  }
  for (Eigen::Index i = 0; i < m.rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.rows.cols(); ++j) {
      binio::put<float>(out, static_cast<float>(m.rows(i, j)));
    }
  }
  return out;
}

}  // namespace

std::string encode_features(const FeatureMatrix& m) {
  if (const auto* e = std::get_if<EmbeddingMatrix>(&m)) {
    return encode_matrix(*e, FeatureKind::kEmbedding);
  }
  return encode_matrix(std::get<ProbMatrix>(m), FeatureKind::kProbability);
}

FeatureMatrix decode_features(std::string_view bytes) {
  binio::Reader r(bytes, "featbin");
  if (r.take(kFeatMagic.size()) != kFeatMagic) throw FormatError("featbin: bad magic");
  const auto kind = r.get<std::uint8_t>();
  if (kind > 1) throw FormatError("featbin: unknown kind " + std::to_string(kind));
  const auto n = r.get<std::uint64_t>();
  const auto d = r.get<std::uint64_t>();
  if (n > r.remaining() / 4 || (n > 0 && d > r.remaining() / 4 / n)) {
    throw FormatError("featbin: header shape exceeds file size");
  }
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto len = r.get<std::uint32_t>();
    ids.emplace_back(r.take(len));
  }
  if (r.remaining() != n * d * sizeof(float)) {
    throw FormatError("featbin: payload size does not match header shape");
  }
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) rows(i, j) = r.get<float>();
  }
  if (kind == static_cast<std::uint8_t>(FeatureKind::kEmbedding)) {
    EmbeddingMatrix e{std::move(ids), std::move(rows)};
    validate(e);
    return e;
  }
  // Rows were stored as f32; accept the rounding that implies, then
  // renormalize in double.
  ProbMatrix p{std::move(ids), std::move(rows)};
  const double tol = std::max(kSimplexTolerance, static_cast<double>(d) * std::ldexp(1.0, -24));
  validate(p, tol);
  for (Eigen::Index i = 0; i < p.rows.rows(); ++i) p.rows.row(i) /= p.rows.row(i).sum();
  return p;
}

void save_features(const std::filesystem::path& path, const FeatureMatrix& m) {
  binio::write_file(path, encode_features(m));
}

FeatureMatrix load_features(const std::filesystem::path& path) {
  try {
    return decode_features(binio::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  auto m = load_features(path);
  if (auto* e = std::get_if<EmbeddingMatrix>(&m)) return std::move(*e);
  throw FormatError(path.string() + ": expected an embedding featbin, found probabilities");
}

ProbMatrix load_probabilities(const std::filesystem::path& path) {
  auto m = load_features(path);
  if (auto* p = std::get_if<ProbMatrix>(&m)) return std::move(*p);
  throw FormatError(path.string() + ": expected a probability featbin, found embeddings");
}

}  // namespace pppr
