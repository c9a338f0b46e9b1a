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

// Translation tasks and the per-sentence trace each method leaves behind.

#ifndef IDIOMALIGN_RESULTS_HPP_
#define IDIOMALIGN_RESULTS_HPP_

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "idiomalign/error.hpp"
#include "idiomalign/language.hpp"
#include "idiomalign/text.hpp"

namespace idiomalign {

struct TranslationTask {
  std::string id;
  std::string source_sentence;
  std::string source_language;
  std::string target_language;
  std::string idiom_surface;
  std::string idiom_meaning_en;

  Direction direction() const { return {source_language, target_language}; }

  // Throws InputError on an empty field. Returns false when the idiom surface
  // does not occur verbatim in the sentence, which inflection can cause and
  // callers record as a warning.
  bool validate() const {
    const std::pair<const char*, const std::string*> fields[] = {
        {"id", &id},
        {"source_sentence", &source_sentence},
        {"source_language", &source_language},
        {"target_language", &target_language},
        {"idiom_surface", &idiom_surface},
        {"idiom_meaning_en", &idiom_meaning_en},
    };
    for (const auto& [name, value] : fields)
      if (text::is_blank(*value))
        throw InputError(std::string("translation task field '") + name + "' is empty" +
                         (id.empty() ? "" : " (task " + id + ")"));
    language_info(source_language);
    language_info(target_language);
    return source_sentence.find(idiom_surface) != std::string::npos;
  }

  friend bool operator==(const TranslationTask&, const TranslationTask&) = default;
};

enum class Method { kSia, kLia, kDirect };
enum class Path { kIdiomMatch, kMeaningFallback, kLlmNoCandidate, kDirect };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::kSia: return "sia";
    case Method::kLia: return "lia";
    case Method::kDirect: return "direct";
  }
  return "unknown";
}

inline Method parse_method(std::string_view s) {
  if (s == "sia") return Method::kSia;
  if (s == "lia") return Method::kLia;
  if (s == "direct") return Method::kDirect;
  throw InputError("unknown method '" + std::string(s) + "' (expected sia, lia or direct)");
}

inline std::string_view to_string(Path p) {
  switch (p) {
    case Path::kIdiomMatch: return "idiom_match";
    case Path::kMeaningFallback: return "meaning_fallback";
    case Path::kLlmNoCandidate: return "llm_no_candidate";
    case Path::kDirect: return "direct";
  }
  return "unknown";
}

inline Path parse_path(std::string_view s) {
  if (s == "idiom_match") return Path::kIdiomMatch;
  if (s == "meaning_fallback") return Path::kMeaningFallback;
  if (s == "llm_no_candidate") return Path::kLlmNoCandidate;
  if (s == "direct") return Path::kDirect;
  throw ParseError("unknown path '" + std::string(s) + "'");
}

// Either a retrieved knowledge-base idiom (entry_ref, meaning and score set)
// or an LLM-proposed one (only `idiom` set).
struct ResultCandidate {
  std::string idiom;
  std::optional<std::string> entry_ref;
  std::optional<std::string> meaning_en;
  std::optional<double> score;
  bool selected = false;

  friend bool operator==(const ResultCandidate&, const ResultCandidate&) = default;
};

struct PromptExchange {
  std::string stage;
  std::string prompt;
  std::string response;

  friend bool operator==(const PromptExchange&, const PromptExchange&) = default;
};

namespace flags {
inline constexpr std::string_view kConfirmationMismatch = "confirmation_mismatch";
inline constexpr std::string_view kSelectionMismatch = "selection_mismatch";
inline constexpr std::string_view kParseWarning = "parse_warning";
inline constexpr std::string_view kSurfaceNotInSentence = "surface_not_in_sentence";
}  // namespace flags

struct TranslationResult {
  std::string result_id;
  TranslationTask task;
  Method method = Method::kDirect;
  Path path = Path::kDirect;
  std::optional<std::string> matched_idiom;
  std::vector<ResultCandidate> candidates;
  std::vector<PromptExchange> prompts;
  std::string translation;
  std::string translator_model;
  double temperature = 0.0;
  std::vector<std::string> flags;

  bool has_flag(std::string_view f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
  }

  friend bool operator==(const TranslationResult&, const TranslationResult&) = default;
};

inline std::string make_result_id(const TranslationTask& task, Method method,
                                  std::string_view model) {
  return task.id + "/" + std::string(to_string(method)) + "/" + std::string(model);
}

// ---------------------------------------------------------------------------
// JSON

inline constexpr int kResultSchemaVersion = 1;

inline nlohmann::json task_to_json(const TranslationTask& t) {
  return {{"id", t.id},
          {"source_sentence", t.source_sentence},
          {"source_language", t.source_language},
          {"target_language", t.target_language},
          {"idiom_surface", t.idiom_surface},
          {"idiom_meaning_en", t.idiom_meaning_en}};
}

inline TranslationTask task_from_json(const nlohmann::json& j) {
  try {
    return {j.at("id").get<std::string>(),
            j.at("source_sentence").get<std::string>(),
            j.at("source_language").get<std::string>(),
            j.at("target_language").get<std::string>(),
            j.at("idiom_surface").get<std::string>(),
            j.at("idiom_meaning_en").get<std::string>()};
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("malformed translation task: ") + ex.what());
  }
}

inline nlohmann::json result_to_json(const TranslationResult& r) {
  nlohmann::json j;
  j["schema_version"] = kResultSchemaVersion;
  j["result_id"] = r.result_id;
  j["task"] = task_to_json(r.task);
  j["method"] = to_string(r.method);
  j["path"] = to_string(r.path);
  j["matched_idiom"] = r.matched_idiom ? nlohmann::json(*r.matched_idiom) : nlohmann::json();
  auto cands = nlohmann::json::array();
  for (const auto& c : r.candidates) {
    nlohmann::json cj{{"idiom", c.idiom}, {"selected", c.selected}};
    if (c.entry_ref) cj["entry_ref"] = *c.entry_ref;
    if (c.meaning_en) cj["meaning_en"] = *c.meaning_en;
    if (c.score) cj["score"] = *c.score;
    cands.push_back(std::move(cj));
  }
  j["candidates"] = std::move(cands);
  auto prompts = nlohmann::json::array();
  for (const auto& p : r.prompts)
    prompts.push_back({{"stage", p.stage}, {"prompt", p.prompt}, {"response", p.response}});
  j["prompts"] = std::move(prompts);
  j["translation"] = r.translation;
  j["translator_model"] = r.translator_model;
  j["temperature"] = r.temperature;
  j["flags"] = r.flags;
  return j;
}

inline TranslationResult result_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != kResultSchemaVersion)
      throw ParseError("unsupported result schema_version");
    TranslationResult r;
    r.result_id = j.at("result_id").get<std::string>();
    r.task = task_from_json(j.at("task"));
    r.method = parse_method(j.at("method").get<std::string>());
    r.path = parse_path(j.at("path").get<std::string>());
    if (!j.at("matched_idiom").is_null()) r.matched_idiom = j.at("matched_idiom").get<std::string>();
    for (const auto& cj : j.at("candidates")) {
      ResultCandidate c;
      c.idiom = cj.at("idiom").get<std::string>();
      c.selected = cj.value("selected", false);
      if (cj.contains("entry_ref")) c.entry_ref = cj["entry_ref"].get<std::string>();
      if (cj.contains("meaning_en")) c.meaning_en = cj["meaning_en"].get<std::string>();
      if (cj.contains("score")) c.score = cj["score"].get<double>();
      r.candidates.push_back(std::move(c));
    }
    for (const auto& pj : j.at("prompts"))
      r.prompts.push_back({pj.at("stage").get<std::string>(), pj.at("prompt").get<std::string>(),
                           pj.at("response").get<std::string>()});
    r.translation = j.at("translation").get<std::string>();
    r.translator_model = j.at("translator_model").get<std::string>();
    r.temperature = j.at("temperature").get<double>();
    r.flags = j.value("flags", std::vector<std::string>{});
    return r;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("malformed translation result: ") + ex.what());
  } catch (const InputError& ex) {
    throw ParseError(std::string("malformed translation result: ") + ex.what());
  }
}

inline std::vector<TranslationResult> parse_results_jsonl(std::string_view content) {
  std::vector<TranslationResult> out;
  std::size_t line_no = 0;
  for (auto line : text::split_lines(content)) {
    ++line_no;
    if (text::is_blank(line)) continue;
    try {
      out.push_back(result_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError("results line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return out;
}

inline std::vector<TranslationTask> parse_tasks_jsonl(std::string_view content) {
  std::vector<TranslationTask> out;
  std::size_t line_no = 0;
  for (auto line : text::split_lines(content)) {
    ++line_no;
    if (text::is_blank(line)) continue;
    try {
      out.push_back(task_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError("tasks line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Match statistics over SIA runs

struct MatchStatistics {
  std::size_t matched = 0;
  std::size_t unmatched = 0;

  std::size_t total() const { return matched + unmatched; }
  friend bool operator==(const MatchStatistics&, const MatchStatistics&) = default;
};

inline MatchStatistics match_statistics(const std::vector<TranslationResult>& results) {
  MatchStatistics s;
  for (const auto& r : results) (r.path == Path::kIdiomMatch ? s.matched : s.unmatched)++;
  return s;
}

}  // namespace idiomalign

#endif  // IDIOMALIGN_RESULTS_HPP_
