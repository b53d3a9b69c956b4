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

#include <atomic>
#include <cstdlib>
#include <thread>

#include "json.hpp"
#include "pppr/error.hpp"
#include "pppr/llm_gateway.hpp"
#include "support.hpp"
// After Eigen: <resolv.h> defines a _res macro that collides with it.
#include "httplib.h"

namespace pppr {
namespace {

PromptRequest rewrite_request(const std::string& caption, const std::string& tag) {
  PromptRequest r;
  r.user_text = "Rewrite the following text description using different wording while preserving "
                "the same meaning.\n\n" + caption;
  r.temperature = 0.9;
  r.variant_tag = tag;
  return r;
}

TEST(Gateway, MockIsDeterministicAndCached) {
  LlmGateway gw(BackendConfig{});
  const auto req = rewrite_request("Multiple people speak", "1");
  const auto a = gw.complete(req);
  const auto b = gw.complete(req);
  EXPECT_EQ(a.text, "Several people engage in conversation");
  EXPECT_EQ(a.text, b.text);
  EXPECT_FALSE(a.cached);
  EXPECT_TRUE(b.cached);
  EXPECT_EQ(a.backend_id, "mock");
  EXPECT_EQ(gw.backend_calls(), 1u);
}

TEST(Gateway, DigestCoversVariantTag) {
  EXPECT_NE(request_digest("mock", rewrite_request("x", "1")),
            request_digest("mock", rewrite_request("x", "2")));
  EXPECT_NE(request_digest("mock", rewrite_request("x", "1")),
            request_digest("remote", rewrite_request("x", "1")));
  EXPECT_EQ(request_digest("mock", rewrite_request("x", "1")).size(), 64u);
}

TEST(Gateway, DiskCacheLayoutAndReuse) {
  testing::TempDir dir;
  BackendConfig cfg;
  cfg.cache_dir = dir.path();
  const auto req = rewrite_request("A dog barks", "2");
  const std::string digest = request_digest("mock", req);
  {
    LlmGateway gw(cfg);
    EXPECT_FALSE(gw.complete(req).cached);
  }
  const auto file = dir.path() / digest.substr(0, 2) / (digest + ".json");
  ASSERT_TRUE(std::filesystem::exists(file));
  const auto j = nlohmann::json::parse(testing::read_file(file));
  EXPECT_TRUE(j.contains("request"));
  EXPECT_TRUE(j.contains("timestamp"));
  EXPECT_EQ(j["response"], MockBackend().complete(req));

  LlmGateway fresh(cfg);
  const auto r = fresh.complete(req);
  EXPECT_TRUE(r.cached);
  EXPECT_EQ(fresh.backend_calls(), 0u);
}

class CountingBackend : public Backend {
 public:
  std::string id() const override { return "counting"; }
  std::string complete(const PromptRequest& req) override {
    ++calls;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    return "echo " + req.user_text;
  }
  std::atomic<int> calls{0};
};

TEST(Gateway, ConcurrentIdenticalRequestsReachBackendOnce) {
  auto backend = std::make_unique<CountingBackend>();
  auto* raw = backend.get();
  LlmGateway gw(BackendConfig{}, std::move(backend));
  PromptRequest req;
  req.user_text = "same";
  std::vector<std::thread> threads;
  std::vector<std::string> results(16);
  for (int i = 0; i < 16; ++i) {
    threads.emplace_back([&, i] { results[static_cast<std::size_t>(i)] = gw.complete(req).text; });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(raw->calls.load(), 1);
  for (const auto& r : results) EXPECT_EQ(r, "echo same");
}

TEST(Gateway, ConfigValidation) {
  BackendConfig c;
  c.kind = BackendKind::kRemoteHttp;
  EXPECT_THROW(validate(c), ConfigError);  // no endpoint
  c.endpoint = "http://127.0.0.1:1/v1";
  c.max_in_flight = 0;
  EXPECT_THROW(validate(c), ConfigError);
}

// Local chat-completion server whose behavior is scripted per test.
class FakeServer {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&, int call)>;

  explicit FakeServer(Handler h) : handler_(std::move(h)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const int call = ++calls_;
      handler_(req, res, call);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
  }
  int calls() const { return calls_.load(); }

 private:
  Handler handler_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<int> calls_{0};
};

void reply_text(httplib::Response& res, const std::string& text) {
  nlohmann::json body = {{"choices", {{{"message", {{"role", "assistant"}, {"content", text}}}}}}};
  res.set_content(body.dump(), "application/json");
}

BackendConfig remote_config(const std::string& endpoint) {
  setenv("PPPR_TEST_API_KEY", "sk-test", 1);
  BackendConfig c;
  c.kind = BackendKind::kRemoteHttp;
  c.endpoint = endpoint;
  c.model = "llama-test";
  c.api_key_env = "PPPR_TEST_API_KEY";
  c.max_retries = 3;
  c.backoff_base_ms = 1;
  c.backoff_cap_ms = 4;
  c.timeout_ms = 2000;
  return c;
}

TEST(RemoteBackend, MissingApiKeyFailsBeforeNetwork) {
  FakeServer server([](const httplib::Request&, httplib::Response& res, int) { reply_text(res, "x"); });
  auto cfg = remote_config(server.endpoint());
  cfg.api_key_env = "PPPR_TEST_UNSET_KEY";
  unsetenv("PPPR_TEST_UNSET_KEY");
  EXPECT_THROW(LlmGateway{cfg}, ConfigError);
  EXPECT_EQ(server.calls(), 0);
}

TEST(RemoteBackend, SendsChatShapeWithBearerToken) {
  nlohmann::json seen;
  std::string auth;
  FakeServer server([&](const httplib::Request& req, httplib::Response& res, int) {
    seen = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    reply_text(res, "A canine yaps");
  });
  LlmGateway gw(remote_config(server.endpoint()));
  const auto r = gw.complete(rewrite_request("A dog barks", "1"));
  EXPECT_EQ(r.text, "A canine yaps");
  EXPECT_EQ(auth, "Bearer sk-test");
  EXPECT_EQ(seen["model"], "llama-test");
  EXPECT_EQ(seen["messages"][0]["role"], "user");
  EXPECT_DOUBLE_EQ(seen["temperature"].get<double>(), 0.9);
  EXPECT_EQ(seen["max_tokens"], 256);
}

TEST(RemoteBackend, RetriesTransientFailures) {
  FakeServer server([](const httplib::Request&, httplib::Response& res, int call) {
    if (call == 1) {
      res.status = 503;
    } else if (call == 2) {
      res.status = 429;
    } else {
      reply_text(res, "ok text");
    }
  });
  RemoteHttpBackend backend(remote_config(server.endpoint()));
  EXPECT_EQ(backend.complete(rewrite_request("x", "1")), "ok text");
  EXPECT_EQ(backend.attempts(), 3u);
}

TEST(RemoteBackend, ExhaustedRetriesAreTransportError) {
  FakeServer server([](const httplib::Request&, httplib::Response& res, int) { res.status = 500; });
  auto cfg = remote_config(server.endpoint());
  cfg.max_retries = 2;
  RemoteHttpBackend backend(cfg);
  EXPECT_THROW(backend.complete(rewrite_request("x", "1")), TransportError);
  EXPECT_EQ(server.calls(), 3);
}

TEST(RemoteBackend, ClientErrorIsConfigErrorWithoutRetry) {
  FakeServer server([](const httplib::Request&, httplib::Response& res, int) { res.status = 401; });
  RemoteHttpBackend backend(remote_config(server.endpoint()));
  EXPECT_THROW(backend.complete(rewrite_request("x", "1")), ConfigError);
  EXPECT_EQ(server.calls(), 1);
}

TEST(RemoteBackend, EmptyCompletionIsBackendError) {
  FakeServer server([](const httplib::Request&, httplib::Response& res, int) { reply_text(res, "  "); });
  RemoteHttpBackend backend(remote_config(server.endpoint()));
  try {
    backend.complete(rewrite_request("x", "1"));
    FAIL() << "expected BackendError";
  } catch (const TransportError&) {
    FAIL() << "empty completion must not be a transport error";
  } catch (const BackendError&) {
  }
}

TEST(RemoteBackend, TimeoutIsTransportError) {
  FakeServer server([](const httplib::Request&, httplib::Response& res, int) {
    std::this_thread::sleep_for(std::chrono::milliseconds(400));
    reply_text(res, "late");
  });
  auto cfg = remote_config(server.endpoint());
  cfg.timeout_ms = 100;
  cfg.max_retries = 1;
  RemoteHttpBackend backend(cfg);
  EXPECT_THROW(backend.complete(rewrite_request("x", "1")), TransportError);
  EXPECT_EQ(backend.attempts(), 2u);
}

TEST(RemoteBackend, GatewayCacheAvoidsSecondCall) {
  FakeServer server([](const httplib::Request&, httplib::Response& res, int) { reply_text(res, "text"); });
  testing::TempDir dir;
  auto cfg = remote_config(server.endpoint());
  cfg.cache_dir = dir.path();
  const auto req = rewrite_request("A bell rings", "3");
  {
    LlmGateway gw(cfg);
    gw.complete(req);
    EXPECT_TRUE(gw.complete(req).cached);
  }
  LlmGateway again(cfg);
  EXPECT_TRUE(again.complete(req).cached);
  EXPECT_EQ(server.calls(), 1);
}

}  // namespace
}  // namespace pppr
