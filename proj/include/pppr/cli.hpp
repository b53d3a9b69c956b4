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

// The `pppr` command-line front end. Results go to stdout (JSON, or a flat
// table with --human) and diagnostics to stderr. Exit codes: 0 success,
// 1 data/validation error, 2 configuration or usage error, 3 backend or
// transport error.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pppr/audio_features.hpp"
#include "pppr/augmenter.hpp"
#include "pppr/llm_gateway.hpp"

namespace pppr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBackend = 3;

struct PipelinePaths {
  std::optional<std::filesystem::path> input;
  std::optional<std::filesystem::path> output;
  std::optional<std::filesystem::path> cache;
};

// Mirrors the --config JSON document; flags override any value set here.
struct PipelineConfig {
  BackendConfig backend;
  AugmentationPolicy augmentation;
  FeatureParams feature_params;
  PipelinePaths paths;
  std::optional<std::uint64_t> seed;
};

// Unknown keys and ill-typed values raise ConfigError.
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);

// Maps an exception to its exit code.
int exit_code_for(std::exception_ptr e);

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace pppr::cli
