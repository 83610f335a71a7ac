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

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "textrec/errors.hpp"

namespace textrec {

namespace {

std::string env_or_empty(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  return v ? v : "";
}

nlohmann::json base_request(const CompletionParams& params) {
  nlohmann::json body;
  body["model"] = params.model_tag;
  body["temperature"] = params.temperature;
  body["max_tokens"] = params.max_tokens;
  body["top_p"] = params.top_p;
  body["frequency_penalty"] = params.frequency_penalty;
  body["presence_penalty"] = params.presence_penalty;
  return body;
}

std::string post_json(const HttpProviderConfig& config, const std::string& path,
                      const nlohmann::json& body, const std::string& api_key) {
  httplib::Client client(config.base_url);
  client.set_connection_timeout(static_cast<time_t>(config.timeout_s), 0);
  client.set_read_timeout(static_cast<time_t>(config.timeout_s), 0);
  httplib::Headers headers;
  if (!api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + api_key);
  }
  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) {
    throw TimeoutError("no response from " + config.base_url + path + ": " +
                       httplib::to_string(res.error()));
  }
  if (res->status == 401 || res->status == 403) {
    throw ProviderError(ProviderError::Kind::fatal,
                        "authentication rejected (" +
                            std::to_string(res->status) + ")");
  }
  if (res->status == 429) {
    throw RateLimitedError("rate limited by provider");
  }
  if (res->status == 408 || res->status >= 500) {
    throw ProviderError(ProviderError::Kind::transient,
                        "server error " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw ProviderError(ProviderError::Kind::fatal,
                        "unexpected status " + std::to_string(res->status) +
                            ": " + res->body);
  }
  return res->body;
}

}  // namespace

OpenAiCompletionsProvider::OpenAiCompletionsProvider(HttpProviderConfig config)
    : config_(std::move(config)) {
  if (config_.path.empty()) config_.path = "/v1/completions";
}

std::string OpenAiCompletionsProvider::complete(const RenderedPrompt& prompt,
                                                const CompletionParams& params) {
  ++calls_;
  const std::string api_key = env_or_empty(config_.api_key_env);
  if (api_key.empty()) {
    throw ProviderError(ProviderError::Kind::fatal,
                        "missing credentials: set " + config_.api_key_env);
  }
  nlohmann::json body = base_request(params);
  body["prompt"] = prompt.text;
  const std::string raw = post_json(config_, config_.path, body, api_key);
  nlohmann::json j = nlohmann::json::parse(raw, nullptr, false);
  if (j.is_discarded() || !j.contains("choices") || j["choices"].empty()) {
    throw ProviderError(ProviderError::Kind::fatal,
                        "malformed completion response");
  }
  return j["choices"][0].value("text", "");
}

LocalChatProvider::LocalChatProvider(HttpProviderConfig config)
    : config_(std::move(config)) {
  if (config_.path.empty()) config_.path = "/v1/chat/completions";
}

std::string LocalChatProvider::complete(const RenderedPrompt& prompt,
                                        const CompletionParams& params) {
  ++calls_;
  nlohmann::json body = base_request(params);
  body["messages"] = nlohmann::json::array(
      {{{"role", "user"}, {"content", prompt.text}}});
  const std::string raw = post_json(config_, config_.path, body,
                                    env_or_empty(config_.api_key_env));
  nlohmann::json j = nlohmann::json::parse(raw, nullptr, false);
  if (j.is_discarded() || !j.contains("choices") || j["choices"].empty()) {
    throw ProviderError(ProviderError::Kind::fatal,
                        "malformed chat response");
  }
  const auto& choice = j["choices"][0];
  if (choice.contains("message")) {
    return choice["message"].value("content", "");
  }
  return choice.value("text", "");
}

std::unique_ptr<CompletionProvider> make_provider(
    const std::string& kind, const HttpProviderConfig& http_config,
    std::uint64_t mock_seed, const SignalLexicon& lexicon,
    const std::vector<ItemRecord>& items) {
  if (kind == "mock") {
    std::map<std::string, ItemRecord> table;
    for (const auto& item : items) table[item.item_id] = item;
    return std::make_unique<MockProvider>(mock_seed, lexicon, std::move(table));
  }
  if (kind == "openai-completions-compatible") {
    return std::make_unique<OpenAiCompletionsProvider>(http_config);
  }
  if (kind == "local-chat-compatible") {
    return std::make_unique<LocalChatProvider>(http_config);
  }
  throw ConfigError("unknown provider kind: " + kind);
}

}  // namespace textrec
