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

#include <cstdlib>
#include <deque>
#include <mutex>
#include <thread>

#include <gtest/gtest.h>

#include "idiomalign/http_providers.hpp"

namespace idiomalign {
namespace {

// Local stand-in for a remote API. Replies are consumed in order; the last
// one repeats.
class FakeApi {
 public:
  struct Reply {
    int status;
    std::string body;
  };

  FakeApi() {
    const auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mu_);
      requests_.push_back(req);
      const Reply r = replies_.size() > 1 ? replies_.front() : replies_.back();
      if (replies_.size() > 1) replies_.pop_front();
      res.status = r.status;
      res.set_content(r.body, "application/json");
    };
    server_.Post("/v1/chat/completions", handler);
    server_.Post("/embed", handler);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeApi() {
    server_.stop();
    thread_.join();
  }

  void replies(std::deque<Reply> r) {
    std::lock_guard lock(mu_);
    replies_ = std::move(r);
  }
  std::vector<httplib::Request> requests() {
    std::lock_guard lock(mu_);
    return requests_;
  }
  std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port_) + path; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::mutex mu_;
  std::deque<Reply> replies_{{200, "{}"}};
  std::vector<httplib::Request> requests_;
};

std::string chat_reply(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

ChatClientConfig chat_config(const FakeApi& api) {
  ChatClientConfig c;
  c.base_url = api.url("/v1");
  c.model = "gpt-4o";
  c.api_key_env = "IDIOMALIGN_TEST_CHAT_KEY";
  c.timeout = std::chrono::seconds(5);
  return c;
}

const LlmRequest kRequest{"direct_translate", {}, "Translate this.", 0.7};

TEST(Endpoint, Parse) {
  const auto e = Endpoint::parse("https://api.example.com:8443/v1/x");
  EXPECT_EQ(e.origin, "https://api.example.com:8443");
  EXPECT_EQ(e.path, "/v1/x");
  EXPECT_EQ(Endpoint::parse("http://h").path, "/");
  EXPECT_THROW(Endpoint::parse("api.example.com/v1"), ConfigError);
}

TEST(OpenAiChat, SendsPromptAndReadsContent) {
  FakeApi api;
  api.replies({{200, chat_reply("他答应保密。")}});
  ::setenv("IDIOMALIGN_TEST_CHAT_KEY", "sk-test", 1);
  OpenAiChatClient client(chat_config(api));
  EXPECT_EQ(client.model_name(), "gpt-4o");
  EXPECT_EQ(client.complete(kRequest), "他答应保密。");
  const auto reqs = api.requests();
  ASSERT_EQ(reqs.size(), 1u);
  EXPECT_EQ(reqs[0].get_header_value("Authorization"), "Bearer sk-test");
  const auto body = nlohmann::json::parse(reqs[0].body);
  EXPECT_EQ(body.at("model"), "gpt-4o");
  EXPECT_EQ(body.at("messages").at(0).at("content"), "Translate this.");
  EXPECT_EQ(body.at("temperature"), 0.7);
  ::unsetenv("IDIOMALIGN_TEST_CHAT_KEY");
}

TEST(OpenAiChat, ErrorClassification) {
  FakeApi api;
  OpenAiChatClient client(chat_config(api));
  api.replies({{500, "{}"}});
  EXPECT_THROW(client.complete(kRequest), TransportError);
  api.replies({{429, "{}"}});
  EXPECT_THROW(client.complete(kRequest), TransportError);
  api.replies({{400, R"({"error":"bad"})"}});
  try {
    client.complete(kRequest);
    FAIL() << "expected Error";
  } catch (const TransportError&) {
    FAIL() << "4xx must not be retryable";
  } catch (const Error&) {
  }
  api.replies({{200, "not json"}});
  EXPECT_THROW(client.complete(kRequest), ParseError);
  api.replies({{200, R"({"choices":[]})"}});
  EXPECT_THROW(client.complete(kRequest), ParseError);
}

TEST(OpenAiChat, RetriesThroughTransientFailures) {
  FakeApi api;
  api.replies({{503, "{}"}, {429, "{}"}, {200, chat_reply("ok")}});
  OpenAiChatClient client(chat_config(api));
  EXPECT_EQ(complete_with_retries(client, kRequest, {3, std::chrono::milliseconds(0)}), "ok");
  EXPECT_EQ(api.requests().size(), 3u);
}

TEST(OpenAiChat, UnreachableHostIsTransportError) {
  ChatClientConfig c;
  c.base_url = "http://127.0.0.1:1/v1";
  c.timeout = std::chrono::seconds(2);
  OpenAiChatClient client(c);
  EXPECT_THROW(client.complete(kRequest), TransportError);
}

HttpEmbeddingConfig embed_config(const FakeApi& api) {
  HttpEmbeddingConfig c;
  c.endpoint = api.url("/embed");
  c.model = "mini";
  c.dim = 3;
  c.timeout = std::chrono::seconds(5);
  c.retry_backoff = std::chrono::milliseconds(0);
  return c;
}

TEST(HttpEmbedding, BatchAndCache) {
  FakeApi api;
  api.replies({{200, R"({"vectors":[[1,0,0],[0,1,0]]})"}, {200, R"({"vectors":[[0,0,1]]})"}});
  HttpEmbeddingProvider p(embed_config(api));
  EXPECT_EQ(p.name(), "remote:mini");
  const std::vector<std::string> texts{"a", "b"};
  const auto v = p.embed_batch(texts);
  EXPECT_EQ(v[1], EmbeddingVector({0, 1, 0}));
  EXPECT_EQ(p.embed("a"), EmbeddingVector({1, 0, 0}));  // cached, no request
  EXPECT_EQ(p.embed("c"), EmbeddingVector({0, 0, 1}));
  const auto reqs = api.requests();
  ASSERT_EQ(reqs.size(), 2u);
  EXPECT_EQ(nlohmann::json::parse(reqs[0].body).at("input"), nlohmann::json({"a", "b"}));
  EXPECT_EQ(nlohmann::json::parse(reqs[1].body).at("input"), nlohmann::json({"c"}));
}

TEST(HttpEmbedding, RetriesAndMalformedReplies) {
  FakeApi api;
  api.replies({{502, "{}"}, {200, R"({"vectors":[[1,2,3]]})"}});
  HttpEmbeddingProvider p(embed_config(api));
  EXPECT_EQ(p.embed("x"), EmbeddingVector({1, 2, 3}));

  api.replies({{500, "{}"}});
  auto cfg = embed_config(api);
  cfg.max_retries = 1;
  try {
    HttpEmbeddingProvider(cfg).embed("y");
    FAIL() << "expected TransportError";
  } catch (const TransportError& ex) {
    EXPECT_EQ(ex.attempts(), 2);
  }

  api.replies({{200, R"({"vectors":[]})"}});
  EXPECT_THROW(HttpEmbeddingProvider(embed_config(api)).embed("z"), ParseError);
  api.replies({{200, R"({"data":1})"}});
  EXPECT_THROW(HttpEmbeddingProvider(embed_config(api)).embed("z"), ParseError);
  // Wrong dimension is caught by the generic embedding check.
  api.replies({{200, R"({"vectors":[[1,2]]})"}});
  EXPECT_THROW(embed_text(HttpEmbeddingProvider(embed_config(api)), "z"), ConfigError);
}

}  // namespace
}  // namespace idiomalign
