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

#include <gtest/gtest.h>

#include "idiomalign/llm_client.hpp"

namespace idiomalign {
namespace {

LlmRequest request(std::string stage, Bindings b) { return {std::move(stage), std::move(b), "prompt", 0.7}; }

TEST(BindingDigest, MatchesIndependentFnv) {
  // FNV-1a64 over "a\x1f" "1\x1e" "b\x1f" "2\x1e", computed in Python.
  EXPECT_EQ(binding_digest({{"a", "1"}, {"b", "2"}}), "cacf46cf81fda9c9");
  EXPECT_EQ(script_key("lia_select", {{"a", "1"}, {"b", "2"}}), "lia_select:cacf46cf81fda9c9");
}

TEST(BindingDigest, SeparatorsPreventCollisions) {
  EXPECT_NE(binding_digest({{"a", "bc"}}), binding_digest({{"ab", "c"}}));
  EXPECT_NE(binding_digest({{"a", ""}, {"b", ""}}), binding_digest({{"a", "b"}}));
}

TEST(ScriptedClient, ExactKeyBeatsStageFallback) {
  ScriptedLlmClient c("mock");
  c.set("direct_translate", {{"sentence", "x"}}, "exact");
  c.set_stage_default("direct_translate", "fallback");
  EXPECT_EQ(c.complete(request("direct_translate", {{"sentence", "x"}})), "exact");
  EXPECT_EQ(c.complete(request("direct_translate", {{"sentence", "y"}})), "fallback");
  EXPECT_THROW(c.complete(request("lia_select", {})), UnscriptedRequestError);
  EXPECT_EQ(c.requests().size(), 3u);
}

TEST(ScriptedClient, ResponseTemplating) {
  ScriptedLlmClient c("mock");
  c.set_stage_default("s", "[{{target_language}}] {{sentence}} {{ not closed");
  EXPECT_EQ(c.complete(request("s", {{"target_language", "Chinese"}, {"sentence", "hi"}})),
            "[Chinese] hi {{ not closed");
  c.set_stage_default("t", "{{missing}}");
  EXPECT_THROW(c.complete(request("t", {})), UnscriptedRequestError);
}

TEST(ScriptedClient, LoadScriptFormats) {
  ScriptedLlmClient c("mock");
  c.load_script(nlohmann::json::parse(R"({"a:*": "plain", "b:*": {"response": "late", "fail_times": 2},
                                          "c:*": {"fail": true}})"));
  EXPECT_EQ(c.complete(request("a", {})), "plain");
  EXPECT_THROW(c.complete(request("b", {})), TransportError);
  EXPECT_THROW(c.complete(request("b", {})), TransportError);
  EXPECT_EQ(c.complete(request("b", {})), "late");
  for (int i = 0; i < 5; ++i) EXPECT_THROW(c.complete(request("c", {})), TransportError);
  EXPECT_THROW(c.load_script(nlohmann::json::array()), ParseError);
  EXPECT_THROW(c.load_script(nlohmann::json{{"nocolon", "x"}}), ParseError);
  EXPECT_THROW(c.load_script(nlohmann::json{{"a:*", 3}}), ParseError);
}

TEST(Retries, TransportFailuresRetriedUpToLimit) {
  ScriptedLlmClient c("mock");
  c.set("s:*", {"ok", 3, false});
  EXPECT_EQ(complete_with_retries(c, request("s", {}), {3, std::chrono::milliseconds(0)}), "ok");
  EXPECT_EQ(c.requests().size(), 4u);

  ScriptedLlmClient d("mock");
  d.set("s:*", {"ok", 0, true});
  try {
    complete_with_retries(d, request("s", {}), {2, std::chrono::milliseconds(0)});
    FAIL() << "expected TransportError";
  } catch (const TransportError& ex) {
    EXPECT_EQ(ex.attempts(), 3);
  }
  EXPECT_EQ(d.requests().size(), 3u);
}

TEST(Retries, PermanentErrorsNotRetried) {
  ScriptedLlmClient c("mock");
  EXPECT_THROW(complete_with_retries(c, request("s", {}), {5, std::chrono::milliseconds(0)}),
               UnscriptedRequestError);
  EXPECT_EQ(c.requests().size(), 1u);
}

}  // namespace
}  // namespace idiomalign
