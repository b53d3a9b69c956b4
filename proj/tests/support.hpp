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

// Fixtures shared by the unit, property and acceptance tests.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pppr/cli.hpp"
#include "pppr/dataset.hpp"
#include "pppr/hash.hpp"
#include "pppr/llm_gateway.hpp"

namespace pppr::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    std::random_device rd;
    const std::uint64_t tag = (static_cast<std::uint64_t>(rd()) << 32) ^ ++counter;
    path_ = std::filesystem::temp_directory_path() / ("pppr-test-" + std::to_string(tag));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& body) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  f << body;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Deterministic caption for synthetic clip i, drawn from a small grammar.
inline std::string synthetic_caption(std::size_t i) {
  static const std::vector<std::string> events = {
      "A dog barks",           "A cat meows",          "Multiple people speak",
      "A man speaks",          "A woman talks",        "A baby cries",
      "Birds chirp",           "A car passes by",      "Rain falls on a roof",
      "Wind blows",            "An engine idles",      "A bell rings",
      "A duck quacks",         "Water flows",          "Leaves rustle",
      "A crowd cheers",        "A siren wails",        "Thunder rumbles",
      "A door slams",          "Footsteps echo"};
  static const std::vector<std::string> tails = {
      "",
      " in the distance",
      " nearby",
      " followed by a loud bang",
      " while wind blows",
      " and then stops",
      " continuously",
      " before a horn honks"};
  return events[i % events.size()] + tails[(i / events.size()) % tails.size()];
}

inline std::string synthetic_clip_id(std::size_t i) {
  std::string s = std::to_string(i);
  return "clip" + std::string(s.size() < 6 ? 6 - s.size() : 0, '0') + s;
}

inline DatasetManifest synthetic_manifest(std::size_t clips) {
  DatasetManifest m;
  m.split = Split::kTrain;
  m.entries.reserve(clips);
  for (std::size_t i = 0; i < clips; ++i) {
    ClipEntry e;
    e.clip_id = synthetic_clip_id(i);
    e.captions.push_back(CaptionRecord{e.clip_id, synthetic_caption(i), Origin::kHuman, {}, {}});
    m.entries.push_back(std::move(e));
  }
  return m;
}

// Backend whose answers come from a test-supplied function.
class FnBackend : public Backend {
 public:
  using Fn = std::function<std::string(const PromptRequest&)>;
  explicit FnBackend(Fn fn) : fn_(std::move(fn)) {}
  std::string id() const override { return "scripted"; }
  std::string complete(const PromptRequest& req) override { return fn_(req); }

 private:
  Fn fn_;
};

inline std::unique_ptr<LlmGateway> scripted_gateway(FnBackend::Fn fn) {
  return std::make_unique<LlmGateway>(BackendConfig{}, std::make_unique<FnBackend>(std::move(fn)));
}

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

inline CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliResult r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

inline std::string file_digest(const std::filesystem::path& p) { return sha256_hex(read_file(p)); }

}  // namespace pppr::testing
