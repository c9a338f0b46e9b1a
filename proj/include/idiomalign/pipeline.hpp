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

// The three translation methods.
//
//   SIA     embed the idiom's English meaning, retrieve target-language idioms
//           with similar meanings, have the model confirm one, translate with
//           it as a hint. No candidate above threshold: translate with the
//           English meaning as the hint instead.
//   LIA     ask the model for up to three target-language idioms, have it
//           select one, translate with it. No idiom proposed: translate with
//           the definition the model gave.
//   Direct  translate the sentence with no hint.
//
// Every request/response pair is kept on the result in call order.

#ifndef IDIOMALIGN_PIPELINE_HPP_
#define IDIOMALIGN_PIPELINE_HPP_

#include <algorithm>
#include <atomic>
#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "idiomalign/embedding.hpp"
#include "idiomalign/error.hpp"
#include "idiomalign/knowledge_base.hpp"
#include "idiomalign/language.hpp"
#include "idiomalign/llm_client.hpp"
#include "idiomalign/manifest.hpp"
#include "idiomalign/prompts.hpp"
#include "idiomalign/results.hpp"
#include "idiomalign/retrieval.hpp"
#include "idiomalign/text.hpp"

namespace idiomalign {

struct PipelineConfig {
  RetrievalConfig retrieval;
  double translation_temperature = 0.7;
  double judge_temperature = 0.1;
  int max_llm_retries = 3;
  std::size_t max_lia_candidates = 3;
  std::chrono::milliseconds retry_backoff{500};
  std::size_t parallelism = 1;

  void validate() const {
    retrieval.validate();
    const auto temp_ok = [](double t) { return t >= 0.0 && t <= 2.0; };
    if (!temp_ok(translation_temperature) || !temp_ok(judge_temperature))
      throw InputError("temperatures must lie in [0, 2]");
    if (max_lia_candidates < 1 || max_lia_candidates > 3)
      throw InputError("max_lia_candidates must lie in [1, 3]");
    if (max_llm_retries < 0) throw InputError("max_llm_retries must be >= 0");
    if (parallelism < 1) throw InputError("parallelism must be >= 1");
  }

  RetryPolicy retry_policy() const { return {max_llm_retries, retry_backoff}; }
};

inline nlohmann::json config_to_json(const PipelineConfig& c) {
  return {{"retrieval", {{"threshold", c.retrieval.threshold}, {"k", c.retrieval.k}}},
          {"translation_temperature", c.translation_temperature},
          {"judge_temperature", c.judge_temperature},
          {"max_llm_retries", c.max_llm_retries},
          {"max_lia_candidates", c.max_lia_candidates}};
}

// A method gave up. `partial` holds every exchange made before the failure.
class PipelineError : public Error {
 public:
  PipelineError(const std::string& what, TranslationResult partial, int attempts = 1)
      : Error(what), partial_(std::move(partial)), attempts_(attempts) {}

  const TranslationResult& partial() const noexcept { return partial_; }
  int attempts() const noexcept { return attempts_; }

 private:
  TranslationResult partial_;
  int attempts_;
};

inline constexpr std::string_view kSiaConfirmStage = "sia_confirm";
inline constexpr std::string_view kFormatReminderBinding = "format_reminder";
inline constexpr std::string_view kTranslationReminder =
    "Respond with the translated sentence only.";
inline constexpr std::string_view kLiaReminder =
    "Respond with a numbered list of idioms (1., 2., 3.), or, if no idiom has the same meaning, "
    "only with \"Definition:\" followed by the definition.";

// ---------------------------------------------------------------------------
// Bindings

inline Bindings language_bindings(const TranslationTask& task) {
  const auto& src = language_info(task.source_language);
  const auto& tgt = language_info(task.target_language);
  return {{"source_language", std::string(src.name)},
          {"a_source_language", std::string(src.indefinite)},
          {"target_language", std::string(tgt.name)}};
}

// '<idiom>' (0.78), '<idiom>' (0.72), ... in the order given.
inline std::string format_scored_options(const std::vector<AlignmentCandidate>& candidates) {
  std::vector<std::string> parts;
  for (const auto& c : candidates)
    parts.push_back("'" + c.idiom + "' (" + text::format_fixed(c.score, 2) + ")");
  return text::join(parts, ", ");
}

// Chinese idiom 1: '<idiom>' Chinese idiom 2: '<idiom>' ...
inline std::string format_numbered_options(const std::vector<std::string>& idioms,
                                           std::string_view target_language_name) {
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < idioms.size(); ++i)
    parts.push_back(std::string(target_language_name) + " idiom " + std::to_string(i + 1) +
                    ": '" + idioms[i] + "'");
  return text::join(parts, " ");
}

inline Bindings sia_confirm_bindings(const TranslationTask& task,
                                     const std::vector<AlignmentCandidate>& candidates) {
  Bindings b = language_bindings(task);
  std::vector<std::string> surfaces;
  for (const auto& c : candidates) surfaces.push_back(c.idiom);
  b["source_idiom"] = task.idiom_surface;
  b["definition"] = task.idiom_meaning_en;
  b["options"] = text::join(surfaces, ", ");
  b["scored_options"] = format_scored_options(candidates);
  return b;
}

// Shared by sia_translate and lia_translate. `hint` is the aligned idiom or,
// on the fallback paths, the English meaning/definition.
inline Bindings translate_bindings(const TranslationTask& task, std::string_view hint) {
  Bindings b = language_bindings(task);
  b["source_idiom"] = task.idiom_surface;
  b["target_idiom"] = std::string(hint);
  b["sentence"] = task.source_sentence;
  return b;
}

inline Bindings lia_generate_bindings(const TranslationTask& task) {
  Bindings b = language_bindings(task);
  b["source_idiom"] = task.idiom_surface;
  return b;
}

inline Bindings lia_select_bindings(const TranslationTask& task, std::string_view definition,
                                    const std::vector<std::string>& candidates) {
  Bindings b = language_bindings(task);
  b["source_idiom"] = task.idiom_surface;
  b["definition"] = std::string(definition);
  b["options"] = format_numbered_options(candidates, b["target_language"]);
  return b;
}

inline Bindings direct_bindings(const TranslationTask& task) {
  Bindings b = language_bindings(task);
  b["sentence"] = task.source_sentence;
  return b;
}

// The SIA confirmation is one request: both confirmation templates, joined
// by a newline.
inline std::string render_sia_confirm(const Bindings& b) {
  return render_prompt(TemplateId::kSiaConfirm1, b) + "\n" +
         render_prompt(TemplateId::kSiaConfirm2, b);
}

// ---------------------------------------------------------------------------
// Response parsing

namespace detail {

inline constexpr std::string_view kQuoteChars[] = {"'", "\"", "“", "”", "‘", "’", "「", "」",
                                                   "『", "』", "*", "`", "《", "》"};

inline std::string strip_quotes(std::string_view s) {
  bool changed = true;
  s = text::trim_view(s);
  while (changed && !s.empty()) {
    changed = false;
    for (auto q : kQuoteChars) {
      if (s.size() >= q.size() && s.substr(0, q.size()) == q) {
        s.remove_prefix(q.size());
        changed = true;
      }
      if (s.size() >= q.size() && s.substr(s.size() - q.size()) == q) {
        s.remove_suffix(q.size());
        changed = true;
      }
    }
    s = text::trim_view(s);
  }
  return std::string(s);
}

// Drops trailing glosses: "守口如瓶 (shǒu kǒu rú píng) - keep a secret".
inline std::string clean_candidate(std::string_view s) {
  std::string out = strip_quotes(s);
  static constexpr std::string_view kCuts[] = {" (", "（", "(", " - ", " – ", " — ", ": ", "：", " / "};
  std::size_t cut = out.size();
  for (auto c : kCuts) {
    // "(" only counts when something precedes it.
    const auto pos = out.find(c);
    if (pos != std::string::npos && pos > 0) cut = std::min(cut, pos);
  }
  return strip_quotes(std::string_view(out).substr(0, cut));
}

// "No Chinese idiom has the same meaning."
inline bool is_no_match_statement(std::string_view s) {
  s = text::trim_view(s);
  return text::istarts_with(s, "no ") && text::icontains(s, "idiom");
}

// Leading "N." / "N)" / "N、" list marker; returns the remainder.
inline std::optional<std::string_view> numbered_item(std::string_view line) {
  line = text::trim_view(line);
  while (!line.empty() && (line.front() == '*' || line.front() == '#')) line.remove_prefix(1);
  if (line.size() < 2 || line[0] < '1' || line[0] > '9') return std::nullopt;
  std::string_view rest = line.substr(1);
  for (std::string_view marker : {".", ")", "、", ":"}) {
    if (rest.substr(0, marker.size()) == marker) {
      rest.remove_prefix(marker.size());
      while (!rest.empty() && rest.front() == '*') rest.remove_prefix(1);
      return text::trim_view(rest);
    }
  }
  return std::nullopt;
}

// An ASCII label such as "Definition:" or "Chinese idiom 1:" in front of the
// item. Returns the label (without colon) if present.
inline std::optional<std::string_view> leading_label(std::string_view item,
                                                     std::string_view& rest) {
  for (std::string_view colon : {":", "："}) {
    const auto pos = item.find(colon);
    if (pos == std::string_view::npos || pos == 0) continue;
    const std::string_view label = item.substr(0, pos);
    const bool ascii_words = std::all_of(label.begin(), label.end(), [](char c) {
      return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
             c == ' ' || c == '\'' || c == '*';
    });
    if (!ascii_words) continue;
    rest = text::trim_view(item.substr(pos + colon.size()));
    return label;
  }
  return std::nullopt;
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  std::size_t i = 0;
  while (i < s.size()) {
    bool sep = false;
    for (std::string_view d : {",", "，", "、", ";", "；"}) {
      if (s.substr(i, d.size()) == d) {
        out.push_back(cur);
        cur.clear();
        i += d.size();
        sep = true;
        break;
      }
    }
    if (!sep) cur.push_back(s[i++]);
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

struct LiaParse {
  std::vector<std::string> candidates;
  std::optional<std::string> definition;
  bool warning = false;  // nothing usable in a non-empty response
};

// Pulls "Definition: ..." out of a generation response.
inline std::optional<std::string> extract_definition(std::string_view response) {
  const auto lines = text::split_lines(response);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto at = text::ifind(lines[i], "definition");
    if (at == std::string_view::npos) continue;
    std::string_view rest = lines[i].substr(at);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) continue;
    std::string def(text::trim_view(rest.substr(colon + 1)));
    if (def.empty() && i + 1 < lines.size()) def = text::trim(lines[i + 1]);
    // "Definition: to remain silent. No Chinese idiom has the same meaning."
    for (std::size_t pos = def.find(". "); pos != std::string::npos; pos = def.find(". ", pos + 1)) {
      if (detail::is_no_match_statement(std::string_view(def).substr(pos + 2))) {
        def.resize(pos + 1);
        break;
      }
    }
    def = detail::strip_quotes(def);
    if (!def.empty()) return def;
  }
  return std::nullopt;
}

// Candidate extraction rules:
//  * numbered lines ("1.", "2)", "3、") are items; a leading ASCII label is
//    removed ("Chinese idiom 1: X" -> "X"), items labelled as a definition or
//    consisting only of a label are skipped, and a labelled item holding a
//    comma/、 separated list is split;
//  * "No <lang> idiom ..." statements are never candidates;
//  * without numbered lines, a response that mentions a definition or says no
//    idiom exists yields nothing; otherwise each non-empty line is an item;
//  * items lose quotes and trailing glosses, duplicates are dropped, and at
//    most three are returned.
inline LiaParse parse_lia_response(std::string_view response) {
  LiaParse out;
  out.definition = extract_definition(response);
  const auto lines = text::split_lines(response);

  std::vector<std::string> raw;
  bool saw_numbered = false;
  bool saw_no_match = false;
  for (auto line : lines) {
    auto item = detail::numbered_item(line);
    if (!item) {
      if (detail::is_no_match_statement(line)) saw_no_match = true;
      continue;
    }
    saw_numbered = true;
    std::string_view body = *item;
    if (detail::is_no_match_statement(body)) {
      saw_no_match = true;
      continue;
    }
    std::string_view rest;
    if (auto label = detail::leading_label(body, rest)) {
      if (text::icontains(*label, "definition") || rest.empty()) continue;
      for (auto& part : detail::split_list(rest)) raw.push_back(part);
      continue;
    }
    raw.emplace_back(body);
  }

  if (!saw_numbered && !out.definition && !saw_no_match) {
    for (auto line : lines) {
      const auto t = text::trim_view(line);
      if (t.empty() || t.back() == ':' || detail::is_no_match_statement(t)) continue;
      raw.emplace_back(t);
    }
  }

  for (const auto& r : raw) {
    std::string c = detail::clean_candidate(r);
    if (c.empty() || detail::is_no_match_statement(c)) continue;
    if (std::find(out.candidates.begin(), out.candidates.end(), c) != out.candidates.end())
      continue;
    out.candidates.push_back(std::move(c));
    if (out.candidates.size() == 3) break;
  }
  out.warning = out.candidates.empty() && !out.definition && !saw_no_match;
  return out;
}

inline std::vector<std::string> parse_lia_candidates(std::string_view response) {
  return parse_lia_response(response).candidates;
}

// Index of the single option named in `response` (ASCII case-insensitive
// substring match). An option that only matches inside a longer matching
// option does not count. Zero or several matches give nullopt.
inline std::optional<std::size_t> find_selected_option(std::string_view response,
                                                       const std::vector<std::string>& options) {
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < options.size(); ++i)
    if (!options[i].empty() && text::icontains(response, options[i])) hits.push_back(i);
  std::vector<std::size_t> maximal;
  for (auto i : hits) {
    const bool shadowed = std::any_of(hits.begin(), hits.end(), [&](std::size_t j) {
      return j != i && options[j].size() > options[i].size() &&
             text::icontains(options[j], options[i]);
    });
    if (!shadowed) maximal.push_back(i);
  }
  // The same surface listed twice is still one answer.
  if (maximal.size() > 1 && std::all_of(maximal.begin(), maximal.end(), [&](std::size_t i) {
        return text::iequals_ascii(options[i], options[maximal[0]]);
      }))
    maximal.resize(1);
  if (maximal.size() != 1) return std::nullopt;
  return maximal[0];
}

// ---------------------------------------------------------------------------
// Methods

namespace detail {

class Conversation {
 public:
  Conversation(LlmClient& llm, const PipelineConfig& config, TranslationResult& trace)
      : llm_(llm), config_(config), trace_(trace) {}

  std::string ask(std::string_view stage, const Bindings& bindings, std::string prompt,
                  double temperature) {
    LlmRequest req{std::string(stage), bindings, std::move(prompt), temperature};
    try {
      std::string response = complete_with_retries(llm_, req, config_.retry_policy());
      trace_.prompts.push_back({req.stage, req.prompt, response});
      return response;
    } catch (const TransportError& ex) {
      trace_.prompts.push_back({req.stage, req.prompt, ""});
      throw PipelineError(std::string(stage) + ": " + ex.what(), trace_, ex.attempts());
    } catch (const Error& ex) {
      trace_.prompts.push_back({req.stage, req.prompt, ""});
      throw PipelineError(std::string(stage) + ": " + ex.what(), trace_);
    }
  }

  // Asks again once with a format reminder when the response is blank.
  std::string translate(std::string_view stage, const Bindings& bindings, const std::string& prompt) {
    const double t = config_.translation_temperature;
    std::string response = text::trim(ask(stage, bindings, prompt, t));
    if (!response.empty()) return response;
    Bindings again = bindings;
    again[std::string(kFormatReminderBinding)] = std::string(kTranslationReminder);
    response = text::trim(ask(stage, again, prompt + "\n\n" + std::string(kTranslationReminder), t));
    if (response.empty())
      throw PipelineError(std::string(stage) + ": empty translation after re-ask", trace_);
    return response;
  }

 private:
  LlmClient& llm_;
  const PipelineConfig& config_;
  TranslationResult& trace_;
};

inline TranslationResult start_result(const TranslationTask& task, Method method,
                                      const LlmClient& llm, const PipelineConfig& config) {
  config.validate();
  TranslationResult r;
  const bool surface_found = task.validate();
  r.result_id = make_result_id(task, method, llm.model_name());
  r.task = task;
  r.method = method;
  r.translator_model = llm.model_name();
  r.temperature = config.translation_temperature;
  if (!surface_found) r.flags.emplace_back(flags::kSurfaceNotInSentence);
  return r;
}

}  // namespace detail

inline TranslationResult run_sia(const TranslationTask& task, const MeaningIndex& index,
                                 const EmbeddingProvider& embedder, LlmClient& llm,
                                 const PipelineConfig& config = {}) {
  TranslationResult r = detail::start_result(task, Method::kSia, llm, config);
  if (index.target_language != task.target_language)
    throw InputError("meaning index is for '" + index.target_language + "' but task " + task.id +
                     " targets '" + task.target_language + "'");
  if (embedder.name() != index.provider_name)
    throw ConfigError("embedding provider '" + embedder.name() +
                      "' differs from the index provider '" + index.provider_name + "'");

  EmbeddingVector query;
  try {
    query = embed_text(embedder, normalize_meaning_key(task.idiom_meaning_en));
  } catch (const TransportError& ex) {
    throw PipelineError(std::string("embedding query failed: ") + ex.what(), r, ex.attempts());
  }
  const auto retrieved = retrieve_candidates(index, query, config.retrieval);
  for (const auto& c : retrieved)
    r.candidates.push_back({c.idiom, c.entry_ref, c.meaning_en, c.score, false});

  detail::Conversation conv(llm, config, r);
  const std::string stage(to_string(TemplateId::kSiaTranslate));

  if (retrieved.empty()) {
    const Bindings b = translate_bindings(task, task.idiom_meaning_en);
    r.translation = conv.translate(stage, b, render_prompt(TemplateId::kSiaTranslate, b));
    r.path = Path::kMeaningFallback;
    return r;
  }

  const Bindings confirm = sia_confirm_bindings(task, retrieved);
  const std::string answer = conv.ask(kSiaConfirmStage, confirm, render_sia_confirm(confirm),
                                      config.translation_temperature);
  std::vector<std::string> surfaces;
  for (const auto& c : retrieved) surfaces.push_back(c.idiom);
  std::size_t chosen = 0;
  if (auto pick = find_selected_option(answer, surfaces))
    chosen = *pick;
  else
    r.flags.emplace_back(flags::kConfirmationMismatch);
  r.candidates[chosen].selected = true;

  const Bindings b = translate_bindings(task, retrieved[chosen].idiom);
  r.translation = conv.translate(stage, b, render_prompt(TemplateId::kSiaTranslate, b));
  r.matched_idiom = retrieved[chosen].idiom;
  r.path = Path::kIdiomMatch;
  return r;
}

inline TranslationResult run_lia(const TranslationTask& task, LlmClient& llm,
                                 const PipelineConfig& config = {}) {
  TranslationResult r = detail::start_result(task, Method::kLia, llm, config);
  detail::Conversation conv(llm, config, r);
  const double t = config.translation_temperature;

  const std::string gen_stage(to_string(TemplateId::kLiaGenerate));
  const Bindings gen = lia_generate_bindings(task);
  const std::string gen_prompt = render_prompt(TemplateId::kLiaGenerate, gen);
  LiaParse parsed = parse_lia_response(conv.ask(gen_stage, gen, gen_prompt, t));
  if (parsed.warning) {
    Bindings again = gen;
    again[std::string(kFormatReminderBinding)] = std::string(kLiaReminder);
    parsed = parse_lia_response(
        conv.ask(gen_stage, again, gen_prompt + "\n\n" + std::string(kLiaReminder), t));
    if (parsed.warning) {
      r.flags.emplace_back(flags::kParseWarning);
      throw PipelineError("lia_generate: response has neither idioms nor a definition", r);
    }
  }
  const std::string definition = parsed.definition.value_or(task.idiom_meaning_en);
  const std::string translate_stage(to_string(TemplateId::kLiaTranslate));

  if (parsed.candidates.empty()) {
    const Bindings b = translate_bindings(task, definition);
    r.translation = conv.translate(translate_stage, b, render_prompt(TemplateId::kLiaTranslate, b));
    r.path = Path::kLlmNoCandidate;
    return r;
  }

  auto options = parsed.candidates;
  if (options.size() > config.max_lia_candidates) options.resize(config.max_lia_candidates);
  for (const auto& o : options) r.candidates.push_back({o, std::nullopt, std::nullopt, std::nullopt, false});

  const Bindings sel = lia_select_bindings(task, definition, options);
  const std::string answer = conv.ask(to_string(TemplateId::kLiaSelect), sel,
                                      render_prompt(TemplateId::kLiaSelect, sel), t);
  std::size_t chosen = 0;
  if (auto pick = find_selected_option(answer, options))
    chosen = *pick;
  else
    r.flags.emplace_back(flags::kSelectionMismatch);
  r.candidates[chosen].selected = true;

  const Bindings b = translate_bindings(task, options[chosen]);
  r.translation = conv.translate(translate_stage, b, render_prompt(TemplateId::kLiaTranslate, b));
  r.matched_idiom = options[chosen];
  r.path = Path::kIdiomMatch;
  return r;
}

inline TranslationResult run_direct(const TranslationTask& task, LlmClient& llm,
                                    const PipelineConfig& config = {}) {
  TranslationResult r = detail::start_result(task, Method::kDirect, llm, config);
  detail::Conversation conv(llm, config, r);
  const Bindings b = direct_bindings(task);
  r.translation = conv.translate(to_string(TemplateId::kDirectTranslate), b,
                                 render_prompt(TemplateId::kDirectTranslate, b));
  r.path = Path::kDirect;
  return r;
}

// ---------------------------------------------------------------------------
// Batches

// Calls fn(i) for every i in [0, count) on up to `workers` threads. fn must
// not throw.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
}

struct BatchDependencies {
  LlmClient* llm = nullptr;
  const MeaningIndex* index = nullptr;       // SIA only
  const EmbeddingProvider* embedder = nullptr;  // SIA only
  PipelineConfig config;
};

struct TaskFailure {
  std::size_t position = 0;
  std::string task_id;
  std::string message;
  int attempts = 1;
  std::optional<TranslationResult> partial;
};

struct BatchOutput {
  std::vector<TranslationResult> results;  // successes, in input order
  std::vector<TaskFailure> failures;       // in input order
  nlohmann::json manifest;
};

class BatchError : public Error {
 public:
  BatchError(const std::string& what, BatchOutput output)
      : Error(what), output_(std::move(output)) {}
  const BatchOutput& output() const noexcept { return output_; }

 private:
  BatchOutput output_;
};

inline TranslationResult run_method(Method method, const TranslationTask& task,
                                    const BatchDependencies& deps) {
  switch (method) {
    case Method::kSia:
      if (!deps.index || !deps.embedder)
        throw InputError("SIA needs a meaning index and an embedding provider");
      return run_sia(task, *deps.index, *deps.embedder, *deps.llm, deps.config);
    case Method::kLia:
      return run_lia(task, *deps.llm, deps.config);
    case Method::kDirect:
      return run_direct(task, *deps.llm, deps.config);
  }
  throw InputError("unknown method");
}

// Runs `method` over all tasks with up to config.parallelism workers. A task
// that fails is recorded and the batch continues; if every task fails a
// BatchError carrying the failures is thrown.
inline BatchOutput run_batch(const std::vector<TranslationTask>& tasks, Method method,
                             const BatchDependencies& deps) {
  if (!deps.llm) throw InputError("run_batch needs an LLM client");
  deps.config.validate();
  for (const auto& t : tasks)
    if (t.source_language != tasks.front().source_language ||
        t.target_language != tasks.front().target_language)
      throw InputError("all tasks in a batch must share one language direction");

  const std::string started = utc_now_iso();
  std::vector<std::optional<TranslationResult>> slots(tasks.size());
  std::vector<std::optional<TaskFailure>> errors(tasks.size());
  parallel_for(tasks.size(), deps.config.parallelism, [&](std::size_t i) {
    try {
      slots[i] = run_method(method, tasks[i], deps);
    } catch (const PipelineError& ex) {
      errors[i] = TaskFailure{i, tasks[i].id, ex.what(), ex.attempts(), ex.partial()};
    } catch (const Error& ex) {
      errors[i] = TaskFailure{i, tasks[i].id, ex.what(), 1, std::nullopt};
    }
  });

  BatchOutput out;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (slots[i]) out.results.push_back(std::move(*slots[i]));
    if (errors[i]) out.failures.push_back(std::move(*errors[i]));
  }
  const nlohmann::json config_json = config_to_json(deps.config);
  out.manifest = {
      {"tool", "idiomalign"},
      {"version", kVersion},
      {"method", to_string(method)},
      {"direction", tasks.empty() ? std::string() : tasks.front().direction().str()},
      {"translator_model", deps.llm->model_name()},
      {"embedding_provider", deps.embedder ? deps.embedder->name() : std::string()},
      {"config", config_json},
      {"config_digest", json_digest(config_json)},
      {"task_count", tasks.size()},
      {"result_count", out.results.size()},
      {"failure_count", out.failures.size()},
      {"started_at", started},
      {"finished_at", utc_now_iso()},
  };
  if (!tasks.empty() && out.results.empty()) {
    const std::string what = "all " + std::to_string(tasks.size()) +
                             " tasks failed; first error: " + out.failures.front().message;
    throw BatchError(what, std::move(out));
  }
  return out;
}

}  // namespace idiomalign

#endif  // IDIOMALIGN_PIPELINE_HPP_
