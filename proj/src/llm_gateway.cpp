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

#include "pppr/llm_gateway.hpp"

#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "pppr/error.hpp"
#include "pppr/hash.hpp"
#include "pppr/text.hpp"

namespace pppr {

using nlohmann::json;

void validate(const BackendConfig& cfg) {
  if (cfg.kind == BackendKind::kRemoteHttp &&
      (!cfg.endpoint || cfg.endpoint->empty())) {
    throw ConfigError("remote backend requires an endpoint URL");
  }
  if (cfg.timeout_ms <= 0) throw ConfigError("timeout_ms must be positive");
  if (cfg.max_retries < 0) throw ConfigError("max_retries must be non-negative");
  if (cfg.backoff_base_ms < 0 || cfg.backoff_cap_ms < 0) {
    throw ConfigError("backoff delays must be non-negative");
  }
  if (cfg.max_in_flight < 1) throw ConfigError("max_in_flight must be at least 1");
  if (cfg.api_key_env.empty()) throw ConfigError("api_key_env must name a variable");
}

nlohmann::ordered_json to_json(const PromptRequest& req) {
  nlohmann::ordered_json j;
  j["system_text"] = req.system_text ? json(*req.system_text) : json(nullptr);
  j["user_text"] = req.user_text;
  j["temperature"] = req.temperature;
  j["max_tokens"] = req.max_tokens;
  j["variant_tag"] = req.variant_tag ? json(*req.variant_tag) : json(nullptr);
  return j;
}

std::string request_digest(std::string_view backend_id, const PromptRequest& req) {
  std::string material(backend_id);
  material.push_back('\n');
  material += to_json(req).dump();
  return sha256_hex(material);
}

// ---------------------------------------------------------------------------
// Remote backend

RemoteHttpBackend::RemoteHttpBackend(const BackendConfig& cfg) : cfg_(cfg) {
  validate(cfg_);
  if (cfg_.kind != BackendKind::kRemoteHttp) {
    throw ConfigError("RemoteHttpBackend requires a remote_http config");
  }
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(*cfg_.endpoint, m, kUrl)) {
    throw ConfigError("malformed endpoint URL '" + *cfg_.endpoint + "'");
  }
  scheme_host_port_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/";
  const char* key = std::getenv(cfg_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw ConfigError("environment variable " + cfg_.api_key_env +
                      " is not set; the remote backend needs an API key");
  }
  api_key_ = key;
}

std::string RemoteHttpBackend::id() const {
  return "remote:" + *cfg_.endpoint + "#" + cfg_.model;
}

namespace {

std::string extract_completion(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw BackendError(std::string("unparseable completion response: ") + e.what());
  }
  const auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array() || choices->empty()) {
    throw BackendError("completion response has no choices");
  }
  const json& first = (*choices)[0];
  if (auto msg = first.find("message"); msg != first.end() && msg->is_object()) {
    if (auto c = msg->find("content"); c != msg->end() && c->is_string()) {
      return c->get<std::string>();
    }
  }
  if (auto t = first.find("text"); t != first.end() && t->is_string()) {
    return t->get<std::string>();
  }
  throw BackendError("first choice carries no text");
}

}  // namespace

std::string RemoteHttpBackend::complete(const PromptRequest& req) {
  json body;
  body["model"] = cfg_.model;
  body["messages"] = json::array();
  if (req.system_text) {
    body["messages"].push_back({{"role", "system"}, {"content", *req.system_text}});
  }
  body["messages"].push_back({{"role", "user"}, {"content", req.user_text}});
  body["temperature"] = req.temperature;
  body["max_tokens"] = req.max_tokens;
  const std::string payload = body.dump();

  httplib::Client cli(scheme_host_port_);
  const auto timeout = std::chrono::milliseconds(cfg_.timeout_ms);
  cli.set_connection_timeout(timeout);
  cli.set_read_timeout(timeout);
  cli.set_write_timeout(timeout);
  const httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};

  std::string last_failure;
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) {
      const double delay = std::min<double>(
          cfg_.backoff_cap_ms, cfg_.backoff_base_ms * std::ldexp(1.0, attempt - 1));
      std::this_thread::sleep_for(
          std::chrono::milliseconds(static_cast<std::int64_t>(delay)));
    }
    ++attempts_;
    auto res = cli.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_failure = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    const int status = res->status;
    if (status >= 200 && status < 300) {
      std::string text = extract_completion(res->body);
      if (text::trim(text).empty()) throw BackendError("backend returned an empty completion");
      return text;
    }
    if (status == 408 || status == 429 || status >= 500) {
      last_failure = "HTTP " + std::to_string(status);
      continue;
    }
    throw ConfigError("backend rejected the request with HTTP " +
                      std::to_string(status) + ": " + res->body.substr(0, 200));
  }
  throw TransportError("giving up after " + std::to_string(cfg_.max_retries + 1) +
                       " attempts; last error: " + last_failure);
}

std::unique_ptr<Backend> make_backend(const BackendConfig& cfg) {
  validate(cfg);
  if (cfg.kind == BackendKind::kMock) return std::make_unique<MockBackend>();
  return std::make_unique<RemoteHttpBackend>(cfg);
}

// ---------------------------------------------------------------------------
// Gateway

LlmGateway::LlmGateway(BackendConfig cfg)
    : LlmGateway(cfg, make_backend(cfg)) {}

LlmGateway::LlmGateway(BackendConfig cfg, std::unique_ptr<Backend> backend)
    : cfg_(std::move(cfg)),
      backend_(std::move(backend)),
      backend_id_(backend_->id()),
      in_flight_(std::max(1, cfg_.max_in_flight)) {
  validate(cfg_);
}

std::filesystem::path LlmGateway::cache_path(const std::string& digest) const {
  return *cfg_.cache_dir / digest.substr(0, 2) / (digest + ".json");
}

std::optional<std::string> LlmGateway::cache_lookup(const std::string& digest) {
  if (!cfg_.cache_dir) return std::nullopt;
  std::ifstream in(cache_path(digest), std::ios::binary);
  if (!in) return std::nullopt;
  try {
    json j = json::parse(in);
    std::string text = j.at("response").get<std::string>();
    if (text::trim(text).empty()) return std::nullopt;
    return text;
  } catch (const json::exception&) {
    // Unreadable entries count as misses and get rewritten.
    return std::nullopt;
  }
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void LlmGateway::cache_store(const std::string& digest, const PromptRequest& req,
                             const std::string& text) {
  if (!cfg_.cache_dir) return;
  namespace fs = std::filesystem;
  const fs::path target = cache_path(digest);
  std::error_code ec;
  fs::create_directories(target.parent_path(), ec);
  if (ec) throw ConfigError("cannot create cache directory " + target.parent_path().string());
  if (fs::exists(target, ec)) return;

  nlohmann::ordered_json j;
  j["request"] = to_json(req);
  j["response"] = text;
  j["timestamp"] = utc_timestamp();

  std::ostringstream tid;
  tid << std::this_thread::get_id();
  const fs::path tmp = target.string() + "." + sha256_hex(tid.str()).substr(0, 12) + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << j.dump(2) << '\n';
    if (!out) throw ConfigError("cannot write cache entry " + tmp.string());
  }
  // A hard link refuses to replace an existing file, so the first writer wins.
  fs::create_hard_link(tmp, target, ec);
  fs::remove(tmp, ec);
}

CompletionResult LlmGateway::complete(const PromptRequest& req) {
  require(!text::trim(req.user_text).empty(), "prompt user_text must be nonempty");
  require(std::isfinite(req.temperature) && req.temperature >= 0.0,
          "temperature must be finite and non-negative");
  require(req.max_tokens > 0, "max_tokens must be positive");

  const std::string digest = request_digest(backend_id_, req);
  std::promise<std::string> promise;
  std::shared_future<std::string> waiting;
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = memory_.find(digest); it != memory_.end()) {
      return {it->second, backend_id_, true, 0};
    }
    if (auto it = pending_.find(digest); it != pending_.end()) {
      waiting = it->second;
    } else {
      pending_.emplace(digest, promise.get_future().share());
    }
  }
  if (waiting.valid()) return {waiting.get(), backend_id_, true, 0};

  auto finish = [&](auto&& settle) {
    std::lock_guard<std::mutex> lock(mu_);
    settle();
    pending_.erase(digest);
  };

  try {
    if (auto hit = cache_lookup(digest)) {
      finish([&] {
        memory_.emplace(digest, *hit);
        promise.set_value(*hit);
      });
      return {*hit, backend_id_, true, 0};
    }

    const auto start = std::chrono::steady_clock::now();
    std::string text;
    {
      in_flight_.acquire();
      struct Release {
        std::counting_semaphore<>& s;
        ~Release() { s.release(); }
      } release{in_flight_};
      ++backend_calls_;
      text = backend_->complete(req);
    }
    if (text::trim(text).empty()) throw BackendError("backend returned an empty completion");
    const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    cache_store(digest, req, text);
    finish([&] {
      memory_.emplace(digest, text);
      promise.set_value(text);
    });
    return {text, backend_id_, false, latency};
  } catch (...) {
    finish([&] { promise.set_exception(std::current_exception()); });
    throw;
  }
}

}  // namespace pppr
