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

#ifndef IDIOMALIGN_LLM_CLIENT_HPP_
#define IDIOMALIGN_LLM_CLIENT_HPP_

#include <chrono>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "idiomalign/error.hpp"
#include "idiomalign/prompts.hpp"
#include "idiomalign/text.hpp"

namespace idiomalign {

// One completion request. `prompt` is what a real model sees; `stage` and
// `bindings` identify the request for scripted clients and traces.
struct LlmRequest {
  std::string stage;  // template id, or "sia_confirm" for the two-part SIA prompt
  Bindings bindings;
  std::string prompt;
  double temperature = 0.7;
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;

  virtual std::string model_name() const = 0;

  // Returns the response text. Throws TransportError for failures worth
  // retrying; anything else is treated as permanent.
  virtual std::string complete(const LlmRequest& request) = 0;
};

// Stable 64-bit digest of a binding set, 16 lowercase hex digits.
inline std::string binding_digest(const Bindings& bindings) {
  std::uint64_t h = text::kFnvOffsetBasis;
  for (const auto& [name, value] : bindings) {
    h = text::fnv1a64(name, h);
    h = text::fnv1a64("\x1f", h);
    h = text::fnv1a64(value, h);
    h = text::fnv1a64("\x1e", h);
  }
  return text::hex64(h);
}

inline std::string script_key(std::string_view stage, const Bindings& bindings) {
  return std::string(stage) + ":" + binding_digest(bindings);
}

// The scripted client had no response for a request. Never retried.
class UnscriptedRequestError : public Error {
 public:
  using Error::Error;
};

// Deterministic client driven by a script keyed by "<stage>:<binding digest>".
//
// A key "<stage>:*" is a per-stage fallback that is only consulted when no
// exact key matches; it has to be written into the script explicitly. A
// response may reference request bindings as {{name}}. Entries can simulate
// transport trouble: `fail_times` failures before answering, or `fail: true`
// to fail on every call. Safe for concurrent use.
class ScriptedLlmClient final : public LlmClient {
 public:
  struct Entry {
    std::string response;
    int fail_times = 0;
    bool always_fail = false;
  };

  explicit ScriptedLlmClient(std::string model_name) : model_name_(std::move(model_name)) {}

  std::string model_name() const override { return model_name_; }

  void set(const std::string& key, Entry entry) {
    std::lock_guard lock(mu_);
    script_[key] = std::move(entry);
  }
  void set(std::string_view stage, const Bindings& bindings, std::string response) {
    set(script_key(stage, bindings), Entry{std::move(response)});
  }
  void set_stage_default(std::string_view stage, std::string response) {
    set(std::string(stage) + ":*", Entry{std::move(response)});
  }

  // Script file layout: {"<key>": "<response>" | {"response": "...",
  // "fail_times": n, "fail": bool}, ...}.
  void load_script(const nlohmann::json& script) {
    if (!script.is_object()) throw ParseError("mock script must be a JSON object");
    for (const auto& [key, value] : script.items()) {
      if (key.find(':') == std::string::npos)
        throw ParseError("mock script key '" + key + "' is not '<stage>:<digest>'");
      Entry e;
      if (value.is_string()) {
        e.response = value.get<std::string>();
      } else if (value.is_object()) {
        e.response = value.value("response", std::string());
        e.fail_times = value.value("fail_times", 0);
        e.always_fail = value.value("fail", false);
      } else {
        throw ParseError("mock script value for '" + key + "' must be a string or object");
      }
      set(key, std::move(e));
    }
  }

  std::string complete(const LlmRequest& request) override {
    const std::string exact = script_key(request.stage, request.bindings);
    std::string key;
    Entry entry;
    int seen = 0;
    {
      std::lock_guard lock(mu_);
      log_.push_back(request);
      auto it = script_.find(exact);
      if (it == script_.end()) it = script_.find(request.stage + ":*");
      if (it == script_.end())
        throw UnscriptedRequestError("no scripted response for key '" + exact +
                                     "'; prompt was: " + request.prompt);
      key = it->first;
      entry = it->second;
      seen = ++calls_per_key_[key];
    }
    if (entry.always_fail || seen <= entry.fail_times)
      throw TransportError("scripted transport failure for '" + key + "'");
    return expand(entry.response, request.bindings, key);
  }

  std::vector<LlmRequest> requests() const {
    std::lock_guard lock(mu_);
    return log_;
  }

 private:
  static std::string expand(const std::string& response, const Bindings& bindings,
                            const std::string& key) {
    if (response.find("{{") == std::string::npos) return response;
    std::string out;
    std::size_t pos = 0;
    while (true) {
      const auto open = response.find("{{", pos);
      if (open == std::string::npos) break;
      const auto close = response.find("}}", open + 2);
      if (close == std::string::npos) break;
      out.append(response, pos, open - pos);
      const std::string name = response.substr(open + 2, close - open - 2);
      auto it = bindings.find(name);
      if (it == bindings.end())
        throw UnscriptedRequestError("scripted response for '" + key +
                                     "' references unknown binding '" + name + "'");
      out.append(it->second);
      pos = close + 2;
    }
    out.append(response, pos, std::string::npos);
    return out;
  }

  std::string model_name_;
  mutable std::mutex mu_;
  std::map<std::string, Entry> script_;
  std::map<std::string, int> calls_per_key_;
  std::vector<LlmRequest> log_;
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds base_backoff{500};
};

// Transport failures are retried with exponential backoff (base, 2*base, ...)
// up to max_retries extra attempts. The rethrown TransportError carries the
// total attempt count.
inline std::string complete_with_retries(LlmClient& client, const LlmRequest& request,
                                         const RetryPolicy& policy) {
  int attempt = 0;
  while (true) {
    ++attempt;
    try {
      return client.complete(request);
    } catch (const TransportError& ex) {
      if (attempt > policy.max_retries)
        throw TransportError(std::string(ex.what()) + " (after " + std::to_string(attempt) +
                                 " attempts)",
                             attempt);
      if (policy.base_backoff.count() > 0)
        std::this_thread::sleep_for(policy.base_backoff * (1LL << (attempt - 1)));
    }
  }
}

}  // namespace idiomalign

#endif  // IDIOMALIGN_LLM_CLIENT_HPP_
