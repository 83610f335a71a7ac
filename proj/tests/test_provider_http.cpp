/*
 * Copyright 2026 The textrec Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "textrec/provider_http.hpp"

#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "textrec/errors.hpp"

using namespace textrec;

namespace {

// Loopback completion server capturing the last request body.
class FakeServer {
 public:
  FakeServer() {
    server_.Post("/v1/completions", [this](const httplib::Request& req,
                                           httplib::Response& res) {
      last_body = req.body;
      last_auth = req.get_header_value("Authorization");
      ++hits;
      if (rate_limit_remaining > 0) {
        --rate_limit_remaining;
        res.status = 429;
        return;
      }
      nlohmann::json out;
      out["choices"] = {{{"text", "generated text"}}};
      res.set_content(out.dump(), "application/json");
    });
    server_.Post("/v1/chat/completions", [](const httplib::Request&,
                                            httplib::Response& res) {
      nlohmann::json out;
      out["choices"] = {{{"message", {{"role", "assistant"},
                                      {"content", "chat text"}}}}};
      res.set_content(out.dump(), "application/json");
    });
    server_.Post("/unauthorized", [](const httplib::Request&,
                                     httplib::Response& res) {
      res.status = 401;
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this]() { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }

  std::string base_url() const {
    return "http://127.0.0.1:" + std::to_string(port_);
  }

  std::string last_body;
  std::string last_auth;
  std::atomic<int> hits{0};
  int rate_limit_remaining = 0;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

RenderedPrompt simple_prompt() {
  RenderedPrompt p;
  p.item_id = "m1";
  p.text = "Describe the item.";
  return p;
}

}  // namespace

TEST_SUITE("provider_http") {

TEST_CASE("completions provider sends params and parses the response") {
  FakeServer server;
  setenv("TEXTREC_TEST_KEY", "sk-test", 1);
  HttpProviderConfig config;
  config.base_url = server.base_url();
  config.api_key_env = "TEXTREC_TEST_KEY";
  OpenAiCompletionsProvider provider(config);

  CompletionParams params;
  params.model_tag = "text-model-1";
  params.presence_penalty = 0.6;
  const auto text = provider.complete(simple_prompt(), params);
  CHECK(text == "generated text");
  CHECK(server.last_auth == "Bearer sk-test");

  const auto body = nlohmann::json::parse(server.last_body);
  CHECK(body.at("model") == "text-model-1");
  CHECK(body.at("prompt") == "Describe the item.");
  CHECK(body.at("temperature") == 0.0);
  CHECK(body.at("max_tokens") == 512);
  CHECK(body.at("top_p") == 1.0);
  CHECK(body.at("frequency_penalty") == 0.0);
  CHECK(body.at("presence_penalty") == 0.6);
}

TEST_CASE("missing credentials fail fatally without any request") {
  FakeServer server;
  unsetenv("TEXTREC_EMPTY_KEY");
  HttpProviderConfig config;
  config.base_url = server.base_url();
  config.api_key_env = "TEXTREC_EMPTY_KEY";
  OpenAiCompletionsProvider provider(config);
  try {
    provider.complete(simple_prompt(), {});
    FAIL("expected ProviderError");
  } catch (const ProviderError& e) {
    CHECK_FALSE(e.transient());
  }
  CHECK(server.hits == 0);
}

TEST_CASE("auth rejection is fatal") {
  FakeServer server;
  setenv("TEXTREC_TEST_KEY", "sk-test", 1);
  HttpProviderConfig config;
  config.base_url = server.base_url();
  config.path = "/unauthorized";
  config.api_key_env = "TEXTREC_TEST_KEY";
  OpenAiCompletionsProvider provider(config);
  try {
    provider.complete(simple_prompt(), {});
    FAIL("expected ProviderError");
  } catch (const ProviderError& e) {
    CHECK_FALSE(e.transient());
  }
}

TEST_CASE("rate limiting surfaces as transient and retry recovers") {
  FakeServer server;
  server.rate_limit_remaining = 2;
  setenv("TEXTREC_TEST_KEY", "sk-test", 1);
  HttpProviderConfig config;
  config.base_url = server.base_url();
  config.api_key_env = "TEXTREC_TEST_KEY";
  OpenAiCompletionsProvider provider(config);

  RetryPolicy policy;
  policy.max_retries = 5;
  policy.sleeper = [](std::size_t) {};
  const auto text =
      complete_with_retry(provider, simple_prompt(), {}, policy);
  CHECK(text == "generated text");
  CHECK(server.hits == 3);
}

TEST_CASE("local chat provider works without credentials") {
  FakeServer server;
  HttpProviderConfig config;
  config.base_url = server.base_url();
  config.api_key_env = "TEXTREC_UNSET_KEY_123";
  LocalChatProvider provider(config);
  CHECK(provider.complete(simple_prompt(), {}) == "chat text");
}

TEST_CASE("unreachable host maps to a transient timeout") {
  HttpProviderConfig config;
  config.base_url = "http://127.0.0.1:1";  // nothing listens here
  config.timeout_s = 1;
  LocalChatProvider provider(config);
  CHECK_THROWS_AS(provider.complete(simple_prompt(), {}), TimeoutError);
}

TEST_CASE("provider factory covers the configured kinds") {
  HttpProviderConfig config;
  CHECK(make_provider("mock", config, 1, {}, {})->name() == "mock");
  CHECK(make_provider("openai-completions-compatible", config, 1, {}, {})
            ->name() == "openai-completions-compatible");
  CHECK(make_provider("local-chat-compatible", config, 1, {}, {})->name() ==
        "local-chat-compatible");
  CHECK_THROWS_AS(make_provider("telepathy", config, 1, {}, {}), ConfigError);
}

}  // TEST_SUITE
