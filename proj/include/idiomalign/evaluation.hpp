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

// Rubric judging (model and human), score aggregation and judge/human
// agreement.

#ifndef IDIOMALIGN_EVALUATION_HPP_
#define IDIOMALIGN_EVALUATION_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "idiomalign/error.hpp"
#include "idiomalign/llm_client.hpp"
#include "idiomalign/manifest.hpp"
#include "idiomalign/pipeline.hpp"
#include "idiomalign/prompts.hpp"
#include "idiomalign/results.hpp"

namespace idiomalign {

inline constexpr std::string_view kHumanJudgePrefix = "human:";

struct ScoreRecord {
  std::string result_ref;
  std::string judge;  // model name, or "human:<anon id>"
  int score = 0;      // 1..3
  std::optional<std::string> raw_response;
  std::string timestamp;

  bool is_human() const { return judge.starts_with(kHumanJudgePrefix); }
  friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

inline nlohmann::json score_to_json(const ScoreRecord& s) {
  return {{"result_ref", s.result_ref},
          {"judge", s.judge},
          {"score", s.score},
          {"raw_response", s.raw_response ? nlohmann::json(*s.raw_response) : nlohmann::json()},
          {"timestamp", s.timestamp}};
}

inline ScoreRecord score_from_json(const nlohmann::json& j) {
  try {
    ScoreRecord s;
    s.result_ref = j.at("result_ref").get<std::string>();
    s.judge = j.at("judge").get<std::string>();
    s.score = j.at("score").get<int>();
    if (auto it = j.find("raw_response"); it != j.end() && !it->is_null())
      s.raw_response = it->get<std::string>();
    s.timestamp = j.value("timestamp", std::string());
    if (s.score < 1 || s.score > 3)
      throw ParseError("score " + std::to_string(s.score) + " is outside 1..3");
    return s;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("malformed score record: ") + ex.what());
  }
}

inline std::vector<ScoreRecord> parse_scores_jsonl(std::string_view content) {
  std::vector<ScoreRecord> out;
  std::size_t n = 0;
  for (auto line : text::split_lines(content)) {
    ++n;
    if (text::is_blank(line)) continue;
    try {
      out.push_back(score_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError("scores line " + std::to_string(n) + ": " + ex.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Score extraction

// First '1', '2' or '3' that has no digit on either side.
inline std::optional<int> find_rubric_score(std::string_view text) {
  const auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c < '1' || c > '3') continue;
    if (i > 0 && is_digit(text[i - 1])) continue;
    if (i + 1 < text.size() && is_digit(text[i + 1])) continue;
    return c - '0';
  }
  return std::nullopt;
}

inline int parse_rubric_score(std::string_view text) {
  if (auto s = find_rubric_score(text)) return *s;
  throw ParseError("no standalone 1-3 score in '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Judging

struct JudgePrompt {
  TemplateId template_id;
  Bindings bindings;
  std::string text;
};

// The idiom-focused prompt is used when the translator was handed a
// target-language idiom; otherwise the meaning-focused one.
inline bool uses_idiom_prompt(const TranslationResult& result) {
  return result.path == Path::kIdiomMatch;
}

inline JudgePrompt build_judge_prompt(const TranslationResult& result) {
  if (text::is_blank(result.translation))
    throw InputError("result " + result.result_id + " has no translation to judge");
  const TemplateId id =
      uses_idiom_prompt(result) ? TemplateId::kJudgeWithIdiom : TemplateId::kJudgeNoIdiom;
  Bindings b = language_bindings(result.task);
  b["sentence"] = result.task.source_sentence;
  b["idiom"] = result.task.idiom_surface;
  b["translation"] = result.translation;
  std::string text = render_prompt(id, b);
  return {id, std::move(b), std::move(text)};
}

inline constexpr std::string_view kScoreReminder = "Respond with a single score: 1, 2, or 3.";

// The judge never produced a parseable score.
class ScoreParseError : public Error {
 public:
  ScoreParseError(const std::string& what, std::vector<std::string> responses)
      : Error(what), responses_(std::move(responses)) {}
  const std::vector<std::string>& responses() const noexcept { return responses_; }

 private:
  std::vector<std::string> responses_;
};

// Sends the judge prompt at the judge temperature; an unparseable answer is
// asked once more with a reminder appended.
inline ScoreRecord judge_translation(const TranslationResult& result, LlmClient& judge,
                                     const PipelineConfig& config = {}) {
  const JudgePrompt jp = build_judge_prompt(result);
  const std::string stage(to_string(jp.template_id));
  LlmRequest req{stage, jp.bindings, jp.text, config.judge_temperature};
  std::vector<std::string> responses;
  responses.push_back(complete_with_retries(judge, req, config.retry_policy()));
  auto score = find_rubric_score(responses.back());
  if (!score) {
    req.bindings[std::string(kFormatReminderBinding)] = std::string(kScoreReminder);
    req.prompt += "\n\n" + std::string(kScoreReminder);
    responses.push_back(complete_with_retries(judge, req, config.retry_policy()));
    score = find_rubric_score(responses.back());
  }
  if (!score)
    throw ScoreParseError("judge " + judge.model_name() + " gave no 1-3 score for " +
                              result.result_id,
                          responses);
  return {result.result_id, judge.model_name(), *score, responses.back(), record_timestamp()};
}

struct JudgeFailure {
  std::string result_ref;
  std::string message;
  std::vector<std::string> responses;
};

struct JudgeBatch {
  std::vector<ScoreRecord> records;  // in input order
  std::vector<JudgeFailure> failures;
  nlohmann::json manifest;
};

inline JudgeBatch judge_batch(const std::vector<TranslationResult>& results, LlmClient& judge,
                              const PipelineConfig& config = {}) {
  config.validate();
  const std::string started = utc_now_iso();
  std::vector<std::optional<ScoreRecord>> slots(results.size());
  std::vector<std::optional<JudgeFailure>> errors(results.size());
  parallel_for(results.size(), config.parallelism, [&](std::size_t i) {
    try {
      slots[i] = judge_translation(results[i], judge, config);
    } catch (const ScoreParseError& ex) {
      errors[i] = JudgeFailure{results[i].result_id, ex.what(), ex.responses()};
    } catch (const Error& ex) {
      errors[i] = JudgeFailure{results[i].result_id, ex.what(), {}};
    }
  });
  JudgeBatch out;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (slots[i]) out.records.push_back(std::move(*slots[i]));
    if (errors[i]) out.failures.push_back(std::move(*errors[i]));
  }
  out.manifest = {{"tool", "idiomalign"},
                  {"version", kVersion},
                  {"judge_model", judge.model_name()},
                  {"judge_temperature", config.judge_temperature},
                  {"result_count", results.size()},
                  {"score_count", out.records.size()},
                  {"failure_count", out.failures.size()},
                  {"started_at", started},
                  {"finished_at", utc_now_iso()}};
  return out;
}

// ---------------------------------------------------------------------------
// Aggregation

enum class GroupField { kDirection, kTranslator, kJudge, kMethod, kPath };

inline std::string_view to_string(GroupField f) {
  switch (f) {
    case GroupField::kDirection: return "direction";
    case GroupField::kTranslator: return "translator";
    case GroupField::kJudge: return "judge";
    case GroupField::kMethod: return "method";
    case GroupField::kPath: return "path";
  }
  return "unknown";
}

struct ScoreGroup {
  std::map<GroupField, std::string> key;
  std::size_t count = 0;
  long long sum = 0;

  // Full precision; format with display_mean() for tables.
  double mean() const { return static_cast<double>(sum) / static_cast<double>(count); }
};

struct AggregateReport {
  std::vector<ScoreGroup> groups;  // ordered by key
  std::size_t total_records = 0;
};

inline std::string display_mean(double mean) { return text::format_fixed(mean, 3); }

namespace detail {

inline std::unordered_map<std::string, const TranslationResult*> index_results(
    const std::vector<TranslationResult>& results) {
  std::unordered_map<std::string, const TranslationResult*> by_id;
  for (const auto& r : results) by_id.emplace(r.result_id, &r);
  return by_id;
}

inline std::string group_value(GroupField f, const ScoreRecord& s, const TranslationResult& r) {
  switch (f) {
    case GroupField::kDirection: return r.task.direction().str();
    case GroupField::kTranslator: return r.translator_model;
    case GroupField::kJudge: return s.judge;
    case GroupField::kMethod: return std::string(to_string(r.method));
    case GroupField::kPath: return std::string(to_string(r.path));
  }
  return {};
}

}  // namespace detail

inline AggregateReport aggregate_scores(const std::vector<ScoreRecord>& records,
                                        const std::vector<TranslationResult>& results,
                                        const std::set<GroupField>& group_by) {
  const auto by_id = detail::index_results(results);
  std::map<std::map<GroupField, std::string>, ScoreGroup> groups;
  for (const auto& s : records) {
    auto it = by_id.find(s.result_ref);
    if (it == by_id.end()) throw InputError("score refers to unknown result '" + s.result_ref + "'");
    std::map<GroupField, std::string> key;
    for (auto f : group_by) key[f] = detail::group_value(f, s, *it->second);
    auto& g = groups[key];
    g.key = key;
    ++g.count;
    g.sum += s.score;
  }
  AggregateReport report;
  report.total_records = records.size();
  for (auto& [_, g] : groups) report.groups.push_back(std::move(g));
  return report;
}

// Scores split by whether the translation was made with an aligned idiom.
struct PathSplit {
  std::size_t idiom_count = 0;
  std::size_t no_idiom_count = 0;
  long long idiom_sum = 0;
  long long no_idiom_sum = 0;

  std::optional<double> idiom_mean() const {
    if (!idiom_count) return std::nullopt;
    return static_cast<double>(idiom_sum) / static_cast<double>(idiom_count);
  }
  std::optional<double> no_idiom_mean() const {
    if (!no_idiom_count) return std::nullopt;
    return static_cast<double>(no_idiom_sum) / static_cast<double>(no_idiom_count);
  }
  // Count-weighted mean of the two groups, i.e. the mean over all records.
  std::optional<double> total_mean() const {
    const auto n = idiom_count + no_idiom_count;
    if (!n) return std::nullopt;
    return static_cast<double>(idiom_sum + no_idiom_sum) / static_cast<double>(n);
  }
  std::string ratio() const {
    return std::to_string(idiom_count) + ":" + std::to_string(no_idiom_count);
  }
};

inline PathSplit path_split(const std::vector<ScoreRecord>& records,
                            const std::vector<TranslationResult>& results) {
  const auto by_id = detail::index_results(results);
  PathSplit split;
  for (const auto& s : records) {
    auto it = by_id.find(s.result_ref);
    if (it == by_id.end()) throw InputError("score refers to unknown result '" + s.result_ref + "'");
    if (it->second->path == Path::kIdiomMatch) {
      ++split.idiom_count;
      split.idiom_sum += s.score;
    } else {
      ++split.no_idiom_count;
      split.no_idiom_sum += s.score;
    }
  }
  return split;
}

// ---------------------------------------------------------------------------
// Agreement

struct Agreement {
  double rate = 0.0;
  std::size_t compared = 0;
  std::size_t agreed = 0;
  std::size_t judge_only = 0;  // scored by the judge side only, excluded
  std::size_t human_only = 0;
};

// Fraction of results, scored by both sides, on which the two 1-3 scores are
// equal. Each side may score a result at most once.
inline Agreement exact_match_rate(const std::vector<ScoreRecord>& judge_scores,
                                  const std::vector<ScoreRecord>& human_scores) {
  const auto keyed = [](const std::vector<ScoreRecord>& v, const char* side) {
    std::map<std::string, int> m;
    for (const auto& s : v)
      if (!m.emplace(s.result_ref, s.score).second)
        throw InputError(std::string(side) + " scores contain '" + s.result_ref + "' twice");
    return m;
  };
  const auto judge = keyed(judge_scores, "judge");
  const auto human = keyed(human_scores, "human");
  Agreement a;
  for (const auto& [ref, score] : judge) {
    auto it = human.find(ref);
    if (it == human.end()) {
      ++a.judge_only;
      continue;
    }
    ++a.compared;
    if (it->second == score) ++a.agreed;
  }
  a.human_only = human.size() - a.compared;
  if (a.compared == 0) throw InputError("judge and human scores share no result");
  a.rate = static_cast<double>(a.agreed) / static_cast<double>(a.compared);
  return a;
}

}  // namespace idiomalign

#endif  // IDIOMALIGN_EVALUATION_HPP_
