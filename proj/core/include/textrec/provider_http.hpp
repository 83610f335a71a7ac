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

#pragma once

#include <memory>
#include <string>

#include "textrec/augment.hpp"

namespace textrec {

struct HttpProviderConfig {
  std::string base_url = "https://api.openai.com";
  std::string path;          // defaults per provider kind
  std::string api_key_env = "OPENAI_API_KEY";
  std::size_t timeout_s = 60;
};

/// Legacy completions endpoint (POST {path}, {"prompt": ...} ->
/// choices[0].text). Credentials come from the environment variable named
/// in the config; a missing key or a 401/403 is fatal and never retried.
class OpenAiCompletionsProvider : public CompletionProvider {
 public:
  explicit OpenAiCompletionsProvider(HttpProviderConfig config);
  std::string complete(const RenderedPrompt& prompt,
                       const CompletionParams& params) override;
  std::string name() const override { return "openai-completions-compatible"; }

 private:
  HttpProviderConfig config_;
};

/// Chat-style endpoint (POST {path}, {"messages": [...]} ->
/// choices[0].message.content) for locally hosted models. No credentials
/// required unless the env var is set.
class LocalChatProvider : public CompletionProvider {
 public:
  explicit LocalChatProvider(HttpProviderConfig config);
  std::string complete(const RenderedPrompt& prompt,
                       const CompletionParams& params) override;
  std::string name() const override { return "local-chat-compatible"; }

 private:
  HttpProviderConfig config_;
};

/// Factory over the configured provider kinds:
/// mock | openai-completions-compatible | local-chat-compatible.
std::unique_ptr<CompletionProvider> make_provider(
    const std::string& kind, const HttpProviderConfig& http_config,
    std::uint64_t mock_seed, const SignalLexicon& lexicon,
    const std::vector<ItemRecord>& items);

}  // namespace textrec
