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

// Objective metrics over precomputed classifier outputs: Frechet distance on
// embeddings, inception score and paired KL on class probabilities.

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace pppr {

struct EmbeddingMatrix {
  std::vector<std::string> ids;
  Eigen::MatrixXd rows;  // n x d
};

struct ProbMatrix {
  std::vector<std::string> ids;
  Eigen::MatrixXd rows;  // n x C, each row a distribution
};

struct GaussianStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

inline constexpr double kSimplexTolerance = 1e-6;
inline constexpr double kProbabilityFloor = 1e-12;

// Shape, finiteness, and per-row simplex checks; DataError names the row.
void validate(const EmbeddingMatrix& e);
void validate(const ProbMatrix& p, double tolerance = kSimplexTolerance);

GaussianStats fit_gaussian(const EmbeddingMatrix& e);
GaussianStats fit_gaussian(const Eigen::MatrixXd& rows);

Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& m);

double frechet_distance(const GaussianStats& a, const GaussianStats& b, double jitter = 1e-6);

struct InceptionScore {
  double mean = 0.0;
  double std = 0.0;
};

InceptionScore inception_score(const ProbMatrix& p, int splits = 1);

enum class KlDirection { kRefGen, kGenRef };

std::string_view to_string(KlDirection d);
KlDirection parse_kl_direction(std::string_view s);

// Mean over clip_id pairs of KL(ref || gen) (or the reverse), natural log.
double paired_kl(const ProbMatrix& gen, const ProbMatrix& ref,
                 KlDirection direction = KlDirection::kRefGen);

// .featbin: "PPPRFEAT", u8 kind (0 embedding, 1 probability), u64 n, u64 d,
// n ids (u32 byte length + UTF-8), then n*d little-endian f32, row-major.
enum class FeatureKind : std::uint8_t { kEmbedding = 0, kProbability = 1 };

using FeatureMatrix = std::variant<EmbeddingMatrix, ProbMatrix>;

std::string encode_features(const FeatureMatrix& m);
FeatureMatrix decode_features(std::string_view bytes);
void save_features(const std::filesystem::path& path, const FeatureMatrix& m);
FeatureMatrix load_features(const std::filesystem::path& path);

EmbeddingMatrix load_embeddings(const std::filesystem::path& path);
ProbMatrix load_probabilities(const std::filesystem::path& path);

}  // namespace pppr
