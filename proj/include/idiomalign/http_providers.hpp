// Copyright 2026 The idiomalign Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Network-backed providers.
//
// Chat: POST <base_url>/chat/completions
//   {"model", "messages": [{"role": "user", "content"}], "temperature"}
//   -> choices[0].message.content
// Embeddings: POST <endpoint> {"model", "input": [texts]} -> {"vectors": [[...]]}
//
// API keys come from the environment variable named in the config. Timeouts,
// 429 and 5xx responses raise TransportError (retryable); other failures are
// permanent.

#ifndef IDIOMALIGN_HTTP_PROVIDERS_HPP_
#define IDIOMALIGN_HTTP_PROVIDERS_HPP_

#include <chrono>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "idiomalign/embedding.hpp"
#include "idiomalign/error.hpp"
#include "idiomalign/llm_client.hpp"

namespace idiomalign {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // always starts with '/'

  static Endpoint parse(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
      throw ConfigError("URL '" + url + "' needs a scheme (http:// or https://)");
    const auto path_start = url.find('/', scheme_end + 3);
    Endpoint e;
    e.origin = url.substr(0, path_start);
    e.path = path_start == std::string::npos ? "/" : url.substr(path_start);
    return e;
  }
};

inline std::string api_key_from_env(const std::string& variable) {
  if (variable.empty()) return {};
  const char* v = std::getenv(variable.c_str());
  return v ? std::string(v) : std::string();
}

namespace detail {

inline std::unique_ptr<httplib::Client> make_http_client(const Endpoint& ep,
                                                         std::chrono::seconds timeout) {
  auto client = std::make_unique<httplib::Client>(ep.origin);
  if (!client->is_valid()) throw ConfigError("unsupported endpoint '" + ep.origin + "'");
  client->set_connection_timeout(timeout);
  client->set_read_timeout(timeout);
  client->set_write_timeout(timeout);
  return client;
}

inline std::string join_path(const std::string& base, const std::string& suffix) {
  if (base.empty() || base == "/") return suffix;
  return (base.back() == '/' ? base.substr(0, base.size() - 1) : base) + suffix;
}

// POSTs JSON, classifying failures.
inline nlohmann::json post_json(httplib::Client& client, const std::string& path,
                                const nlohmann::json& body, const std::string& api_key) {
  httplib::Headers headers;
  if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) throw TransportError("HTTP request to " + path + " failed: " + httplib::to_string(res.error()));
  if (res->status == 429 || res->status >= 500)
    throw TransportError("HTTP " + std::to_string(res->status) + " from " + path);
  if (res->status < 200 || res->status >= 300)
    throw Error("HTTP " + std::to_string(res->status) + " from " + path + ": " + res->body);
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError("response from " + path + " is not JSON: " + ex.what());
  }
}

}  // namespace detail

struct ChatClientConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4o";
  std::string api_key_env = "OPENAI_API_KEY";
  std::chrono::seconds timeout{60};
};

class OpenAiChatClient final : public LlmClient {
 public:
  explicit OpenAiChatClient(ChatClientConfig config)
      : config_(std::move(config)),
        endpoint_(Endpoint::parse(config_.base_url)),
        api_key_(api_key_from_env(config_.api_key_env)) {}

  std::string model_name() const override { return config_.model; }

  std::string complete(const LlmRequest& request) override {
    const nlohmann::json body{
        {"model", config_.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
        {"temperature", request.temperature}};
    // httplib::Client is not thread-safe; one per call keeps concurrent use safe.
    auto client = detail::make_http_client(endpoint_, config_.timeout);
    const auto reply = detail::post_json(*client, detail::join_path(endpoint_.path, "/chat/completions"),
                                         body, api_key_);
    try {
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(std::string("chat response has no choices[0].message.content: ") + ex.what());
    }
  }

 private:
  ChatClientConfig config_;
  Endpoint endpoint_;
  std::string api_key_;
};

struct HttpEmbeddingConfig {
  std::string endpoint;  // full URL of the embedding route
  std::string model = "paraphrase-MiniLM-L6-v2";
  std::size_t dim = 384;
  std::string api_key_env = "IDIOMALIGN_EMBEDDING_API_KEY";
  std::chrono::seconds timeout{60};
  int max_retries = 3;
  std::chrono::milliseconds retry_backoff{500};
};

// Remote sentence-embedding provider. Vectors are cached per text so repeat
// calls within one instance return identical values.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit HttpEmbeddingProvider(HttpEmbeddingConfig config)
      : config_(std::move(config)),
        endpoint_(Endpoint::parse(config_.endpoint)),
        api_key_(api_key_from_env(config_.api_key_env)) {}

  std::string name() const override { return "remote:" + config_.model; }
  std::size_t dim() const override { return config_.dim; }

  EmbeddingVector embed(std::string_view text) const override {
    const std::string t(text);
    return embed_batch(std::span<const std::string>(&t, 1)).front();
  }

  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override {
    std::vector<std::string> missing;
    {
      std::lock_guard lock(mu_);
      for (const auto& t : texts)
        if (!cache_.contains(t)) missing.push_back(t);
    }
    if (!missing.empty()) {
      auto vectors = fetch(missing);
      std::lock_guard lock(mu_);
      for (std::size_t i = 0; i < missing.size(); ++i) cache_.try_emplace(missing[i], std::move(vectors[i]));
    }
    std::lock_guard lock(mu_);
    std::vector<EmbeddingVector> out;
    for (const auto& t : texts) out.push_back(cache_.at(t));
    return out;
  }

 private:
  std::vector<EmbeddingVector> fetch(const std::vector<std::string>& texts) const {
    const nlohmann::json body{{"model", config_.model}, {"input", texts}};
    int attempt = 0;
    while (true) {
      ++attempt;
      try {
        auto client = detail::make_http_client(endpoint_, config_.timeout);
        const auto reply = detail::post_json(*client, endpoint_.path, body, api_key_);
        const auto& vectors = reply.at("vectors");
        if (vectors.size() != texts.size())
          throw ParseError("embedding response has " + std::to_string(vectors.size()) +
                           " vectors for " + std::to_string(texts.size()) + " inputs");
        std::vector<EmbeddingVector> out;
        for (const auto& v : vectors) out.emplace_back(v.get<std::vector<double>>());
        return out;
      } catch (const TransportError& ex) {
        if (attempt > config_.max_retries)
          throw TransportError(std::string(ex.what()) + " (after " + std::to_string(attempt) +
                                   " attempts)",
                               attempt);
        if (config_.retry_backoff.count() > 0)
          std::this_thread::sleep_for(config_.retry_backoff * (1LL << (attempt - 1)));
      } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("malformed embedding response: ") + ex.what());
      }
    }
  }

  HttpEmbeddingConfig config_;
  Endpoint endpoint_;
  std::string api_key_;
  mutable std::mutex mu_;
  mutable std::map<std::string, EmbeddingVector> cache_;
};

}  // namespace idiomalign

#endif  // IDIOMALIGN_HTTP_PROVIDERS_HPP_
