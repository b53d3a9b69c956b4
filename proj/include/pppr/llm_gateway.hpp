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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <unordered_map>

#include "json.hpp"

namespace pppr {

enum class BackendKind { kRemoteHttp, kMock };

struct BackendConfig {
  BackendKind kind = BackendKind::kMock;
  std::optional<std::string> endpoint;
  std::string model = "llama";
  std::string api_key_env = "LLM_API_KEY";
  int timeout_ms = 30000;
  int max_retries = 3;
  // First retry waits this long; each further retry doubles it.
  int backoff_base_ms = 250;
  int backoff_cap_ms = 8000;
  std::optional<std::filesystem::path> cache_dir;
  int max_in_flight = 8;
};

// Throws ConfigError for an unusable configuration.
void validate(const BackendConfig& cfg);

struct PromptRequest {
  std::optional<std::string> system_text;
  std::string user_text;
  double temperature = 0.0;
  int max_tokens = 256;
  std::optional<std::string> variant_tag;
};

// Canonical JSON form; the cache key is derived from its dump.
nlohmann::ordered_json to_json(const PromptRequest& req);

struct CompletionResult {
  std::string text;
  std::string backend_id;
  bool cached = false;
  std::int64_t latency_ms = 0;
};

// One completion provider. Implementations must be safe to call
// concurrently.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string id() const = 0;
  virtual std::string complete(const PromptRequest& req) = 0;
};

// Rule-based stand-in for the LLM. A pure function of the request.
class MockBackend final : public Backend {
 public:
  std::string id() const override { return "mock"; }
  std::string complete(const PromptRequest& req) override;
};

// JSON-over-HTTP chat-completion client with retry and exponential backoff.
class RemoteHttpBackend final : public Backend {
 public:
  // Reads the bearer token from cfg.api_key_env; throws ConfigError when it
  // is unset, before any network traffic.
  explicit RemoteHttpBackend(const BackendConfig& cfg);
  std::string id() const override;
  std::string complete(const PromptRequest& req) override;

  std::size_t attempts() const { return attempts_.load(); }

 private:
  BackendConfig cfg_;
  std::string scheme_host_port_;
  std::string path_;
  std::string api_key_;
  std::atomic<std::size_t> attempts_{0};
};

std::unique_ptr<Backend> make_backend(const BackendConfig& cfg);

// SHA-256 over backend id and the canonical request serialization.
std::string request_digest(std::string_view backend_id, const PromptRequest& req);

// Front door for every LLM call: validation, bounded concurrency, and a
// content-addressed cache (in memory, plus write-once files under
// cfg.cache_dir when set).
class LlmGateway {
 public:
  explicit LlmGateway(BackendConfig cfg);
  LlmGateway(BackendConfig cfg, std::unique_ptr<Backend> backend);

  CompletionResult complete(const PromptRequest& req);

  const BackendConfig& config() const { return cfg_; }
  const std::string& backend_id() const { return backend_id_; }
  // Number of requests that reached the backend (cache misses).
  std::size_t backend_calls() const { return backend_calls_.load(); }

 private:
  std::optional<std::string> cache_lookup(const std::string& digest);
  void cache_store(const std::string& digest, const PromptRequest& req,
                   const std::string& text);
  std::filesystem::path cache_path(const std::string& digest) const;

  BackendConfig cfg_;
  std::unique_ptr<Backend> backend_;
  std::string backend_id_;
  std::mutex mu_;
  std::unordered_map<std::string, std::string> memory_;
  std::unordered_map<std::string, std::shared_future<std::string>> pending_;
  std::counting_semaphore<> in_flight_;
  std::atomic<std::size_t> backend_calls_{0};
};

}  // namespace pppr
