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

// Prompt templates for idiom alignment, translation and judging.
//
// Placeholders are written {name} with name in [a-z_]. Rendering is a single
// left-to-right pass: substituted values are never rescanned, so sentences
// that happen to contain braces are safe. Template bodies are kept
// byte-for-byte as used in the original experiments (including U+2019 in
// "You’ll" and "idiom’s"); the language names are the only parts that vary
// with the translation direction. "English definition" stays literal because
// the definitions are always English meanings.

#ifndef IDIOMALIGN_PROMPTS_HPP_
#define IDIOMALIGN_PROMPTS_HPP_

#include <array>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "idiomalign/error.hpp"
#include "idiomalign/text.hpp"

namespace idiomalign {

using Bindings = std::map<std::string, std::string, std::less<>>;

enum class TemplateId {
  kSiaConfirm1,
  kSiaConfirm2,
  kSiaTranslate,
  kLiaGenerate,
  kLiaSelect,
  kLiaTranslate,
  kDirectTranslate,
  kJudgeNoIdiom,
  kJudgeWithIdiom,
};

inline constexpr std::array<TemplateId, 9> kAllTemplates{
    TemplateId::kSiaConfirm1,  TemplateId::kSiaConfirm2,     TemplateId::kSiaTranslate,
    TemplateId::kLiaGenerate,  TemplateId::kLiaSelect,       TemplateId::kLiaTranslate,
    TemplateId::kDirectTranslate, TemplateId::kJudgeNoIdiom, TemplateId::kJudgeWithIdiom,
};

inline std::string_view to_string(TemplateId id) {
  switch (id) {
    case TemplateId::kSiaConfirm1: return "sia_confirm_1";
    case TemplateId::kSiaConfirm2: return "sia_confirm_2";
    case TemplateId::kSiaTranslate: return "sia_translate";
    case TemplateId::kLiaGenerate: return "lia_generate";
    case TemplateId::kLiaSelect: return "lia_select";
    case TemplateId::kLiaTranslate: return "lia_translate";
    case TemplateId::kDirectTranslate: return "direct_translate";
    case TemplateId::kJudgeNoIdiom: return "judge_no_idiom";
    case TemplateId::kJudgeWithIdiom: return "judge_with_idiom";
  }
  return "unknown";
}

inline TemplateId parse_template_id(std::string_view s) {
  for (auto id : kAllTemplates)
    if (to_string(id) == s) return id;
  throw InputError("unknown template id '" + std::string(s) + "'");
}

// Rubric shared by model judges and human evaluators.
inline constexpr std::array<std::string_view, 3> kRubricTiers{
    "1 point: Ignores, mistranslates, or only translates the literal meaning of the idiom.",
    "2 points: Conveys basic figurative meaning but may lack refinement or have minor "
    "imperfections.",
    "3 points: Exceptional translation, accurately conveying figurative meaning, context, and "
    "cultural nuances.",
};

inline const std::string& rubric_text() {
  static const std::string text = std::string(kRubricTiers[0]) + " " +
                                  std::string(kRubricTiers[1]) + " " +
                                  std::string(kRubricTiers[2]);
  return text;
}

inline constexpr std::string_view kJudgeFocusIdiom =
    "Focus on the idiom’s counterpart in the translated language.";
inline constexpr std::string_view kJudgeFocusMeaning = "Focus on the idiom’s figurative meaning.";
inline constexpr std::string_view kJudgeScaffold = "Evaluation (score only):";

namespace detail {

inline std::string judge_task_line(std::string_view focus) {
  return "Evaluate the idiom translation in the given {target_language} translation of "
         "{a_source_language} sentence. " +
         std::string(focus);
}

inline std::string judge_body(std::string_view focus) {
  return judge_task_line(focus) + "\n\nEvaluation Criteria: " + rubric_text() +
         "\n\nEvaluate the following translation: {source_language} sentence: {sentence} "
         "Idiom in the {source_language} sentence: {idiom} {target_language} translation: "
         "{translation} " +
         std::string(kJudgeScaffold);
}

}  // namespace detail

inline const std::string& template_body(TemplateId id) {
  static const std::map<TemplateId, std::string> bodies{
      {TemplateId::kSiaConfirm1,
       "You are a linguistic researcher on idioms and are good at {target_language} and "
       "{source_language}. Choose the best {target_language} idiom that matches the following "
       "{source_language} idiom and its definition. {source_language} idiom: '{source_idiom}' "
       "English definition: '{definition}' Here are some options: '{options}'"},
      {TemplateId::kSiaConfirm2,
       "{scored_options}. Please select the most relevant {target_language} idiom and provide a "
       "brief explanation."},
      {TemplateId::kSiaTranslate,
       "'{source_idiom}' means '{target_idiom}'. Given the above knowledge, translate this "
       "sentence to {target_language}: '{sentence}'."},
      {TemplateId::kLiaGenerate,
       "You are a linguistic researcher on idioms and good at {target_language} and "
       "{source_language}. You’ll be provided {a_source_language} idiom and your task is to: 1. "
       "First provide the definition of the idiom: '{source_idiom}'. 2. Then find the three most "
       "similar {target_language} idioms to the {source_language} idiom: '{source_idiom}', and "
       "make sure to maintain context and cultural nuances. Follow these instructions: 1. If you "
       "cannot find three similar {target_language} idioms, return as many as you can find. 2. "
       "If no {target_language} idiom has the same meaning, only define the {source_language} "
       "idiom. 3. For good matches, respond with the {target_language} idiom without pinyin and "
       "ensure it is an actual idiom, not a literal translation."},
      {TemplateId::kLiaSelect,
       "You are a linguistic researcher on idioms and good at {target_language} and "
       "{source_language}. Choose the best {target_language} idiom matching the "
       "{source_language} idiom and its definition. {source_language} idiom: '{source_idiom}' "
       "English definition: '{definition}' Options: {options}. Select the most relevant "
       "{target_language} idiom and provide a brief explanation."},
      {TemplateId::kLiaTranslate,
       "You are a linguistic researcher on idioms and are good at {target_language} and "
       "{source_language}. '{source_idiom}' means '{target_idiom}'. Given the above knowledge, "
       "translate the following sentence to {target_language}: '{sentence}'."},
      {TemplateId::kDirectTranslate, "Translate the following sentence to {target_language}: '{sentence}'"},
      {TemplateId::kJudgeNoIdiom, detail::judge_body(kJudgeFocusMeaning)},
      {TemplateId::kJudgeWithIdiom, detail::judge_body(kJudgeFocusIdiom)},
  };
  return bodies.at(id);
}

namespace detail {

inline bool is_placeholder_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

// Calls on_literal(text) / on_placeholder(name) in order.
template <typename Literal, typename Placeholder>
void scan_template(std::string_view body, Literal&& on_literal, Placeholder&& on_placeholder) {
  std::size_t i = 0;
  std::size_t literal_start = 0;
  while (i < body.size()) {
    if (body[i] == '{') {
      std::size_t j = i + 1;
      while (j < body.size() && is_placeholder_char(body[j])) ++j;
      if (j > i + 1 && j < body.size() && body[j] == '}') {
        on_literal(body.substr(literal_start, i - literal_start));
        on_placeholder(body.substr(i + 1, j - i - 1));
        i = j + 1;
        literal_start = i;
        continue;
      }
    }
    ++i;
  }
  on_literal(body.substr(literal_start));
}

}  // namespace detail

inline std::set<std::string> placeholders(std::string_view body) {
  std::set<std::string> names;
  detail::scan_template(body, [](std::string_view) {},
                        [&](std::string_view name) { names.emplace(name); });
  return names;
}

// Substitutes every {name} in `body`. Extra bindings are ignored; a missing
// one is an InputError naming it.
inline std::string render_template(std::string_view body, const Bindings& bindings) {
  std::string out;
  out.reserve(body.size() + 64);
  detail::scan_template(
      body, [&](std::string_view lit) { out.append(lit); },
      [&](std::string_view name) {
        auto it = bindings.find(name);
        if (it == bindings.end())
          throw InputError("missing binding for placeholder '" + std::string(name) + "'");
        out.append(it->second);
      });
  return out;
}

inline std::string render_prompt(TemplateId id, const Bindings& bindings) {
  try {
    return render_template(template_body(id), bindings);
  } catch (const InputError& ex) {
    throw InputError(std::string(to_string(id)) + ": " + ex.what());
  }
}

// The judge task line alone, with language names filled in. Human evaluators
// see the same instruction the model judge saw.
inline std::string judge_task_prompt(bool with_idiom, const Bindings& bindings) {
  return render_template(
      detail::judge_task_line(with_idiom ? kJudgeFocusIdiom : kJudgeFocusMeaning), bindings);
}

}  // namespace idiomalign

#endif  // IDIOMALIGN_PROMPTS_HPP_
