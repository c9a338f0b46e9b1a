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

// Blind paired human evaluation. Two translations of the same sentence (from
// two translator models) become one task with labels A and B in seeded random
// order. Which model wrote which label lives only in the blind map, a separate
// file the annotators never see.

#ifndef IDIOMALIGN_HUMAN_EVAL_HPP_
#define IDIOMALIGN_HUMAN_EVAL_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "idiomalign/error.hpp"
#include "idiomalign/evaluation.hpp"
#include "idiomalign/knowledge_base.hpp"
#include "idiomalign/manifest.hpp"
#include "idiomalign/results.hpp"
#include "idiomalign/sampling.hpp"

namespace idiomalign {

struct HumanTranslation {
  std::string label;  // "A" or "B"
  std::string text;
  std::string task_prompt;  // the judge instruction matching this translation

  friend bool operator==(const HumanTranslation&, const HumanTranslation&) = default;
};

// What an annotator sees. Carries no model identifiers.
struct HumanTask {
  std::string task_id;
  std::string source_sentence;
  std::string idiom;
  std::string idiom_meaning;
  std::vector<HumanTranslation> translations;  // exactly two, A then B

  friend bool operator==(const HumanTask&, const HumanTask&) = default;
};

struct BlindEntry {
  std::string result_ref;
  std::string model;

  friend bool operator==(const BlindEntry&, const BlindEntry&) = default;
};

// task_id -> label -> producing result.
using BlindMap = std::map<std::string, std::map<std::string, BlindEntry>>;

struct HumanExport {
  std::vector<HumanTask> tasks;
  BlindMap blind_map;
};

inline nlohmann::json human_task_to_json(const HumanTask& t) {
  auto translations = nlohmann::json::array();
  for (const auto& tr : t.translations)
    translations.push_back({{"label", tr.label}, {"text", tr.text}, {"task_prompt", tr.task_prompt}});
  auto rubric = nlohmann::json::array();
  for (auto tier : kRubricTiers) rubric.push_back(tier);
  return {{"task_id", t.task_id},
          {"source_sentence", t.source_sentence},
          {"idiom", t.idiom},
          {"idiom_meaning", t.idiom_meaning},
          {"rubric", std::move(rubric)},
          {"translations", std::move(translations)}};
}

inline HumanTask human_task_from_json(const nlohmann::json& j) {
  try {
    HumanTask t;
    t.task_id = j.at("task_id").get<std::string>();
    t.source_sentence = j.at("source_sentence").get<std::string>();
    t.idiom = j.at("idiom").get<std::string>();
    t.idiom_meaning = j.at("idiom_meaning").get<std::string>();
    for (const auto& tr : j.at("translations"))
      t.translations.push_back({tr.at("label").get<std::string>(), tr.at("text").get<std::string>(),
                                tr.value("task_prompt", std::string())});
    if (t.translations.size() != 2)
      throw ParseError("human task " + t.task_id + " must have exactly two translations");
    return t;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("malformed human task: ") + ex.what());
  }
}

inline nlohmann::json human_tasks_to_json(const std::vector<HumanTask>& tasks) {
  auto arr = nlohmann::json::array();
  for (const auto& t : tasks) arr.push_back(human_task_to_json(t));
  return arr;
}

inline std::vector<HumanTask> human_tasks_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("human task export must be a JSON array");
  std::vector<HumanTask> out;
  for (const auto& item : j) out.push_back(human_task_from_json(item));
  return out;
}

inline nlohmann::json blind_map_to_json(const BlindMap& map, std::uint64_t seed) {
  nlohmann::json tasks = nlohmann::json::object();
  for (const auto& [task_id, labels] : map)
    for (const auto& [label, entry] : labels)
      tasks[task_id][label] = {{"result_ref", entry.result_ref}, {"model", entry.model}};
  return {{"format", "idiomalign.blind_map"}, {"version", 1}, {"seed", seed}, {"tasks", tasks}};
}

inline BlindMap blind_map_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "idiomalign.blind_map")
      throw ParseError("not a blind map file");
    BlindMap map;
    for (const auto& [task_id, labels] : j.at("tasks").items())
      for (const auto& [label, entry] : labels.items())
        map[task_id][label] = {entry.at("result_ref").get<std::string>(),
                               entry.at("model").get<std::string>()};
    return map;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("malformed blind map: ") + ex.what());
  }
}

// Pairs results_a[i] with the result in results_b for the same task id. Task
// ids are "task-0001", ... in results_a order.
inline HumanExport export_human_tasks(const std::vector<TranslationResult>& results_a,
                                      const std::vector<TranslationResult>& results_b,
                                      std::uint64_t seed) {
  std::map<std::string, const TranslationResult*> b_by_task;
  for (const auto& r : results_b)
    if (!b_by_task.emplace(r.task.id, &r).second)
      throw InputError("second result set has task '" + r.task.id + "' twice");

  std::vector<std::string> orphans;
  std::map<std::string, bool> a_seen;
  for (const auto& r : results_a) {
    if (!a_seen.emplace(r.task.id, true).second)
      throw InputError("first result set has task '" + r.task.id + "' twice");
    if (!b_by_task.contains(r.task.id)) orphans.push_back("A-side " + r.task.id);
  }
  for (const auto& r : results_b)
    if (!a_seen.contains(r.task.id)) orphans.push_back("B-side " + r.task.id);
  if (!orphans.empty())
    throw InputError("results do not pair one-to-one; orphans: " + text::join(orphans, ", "));

  HumanExport out;
  SeededRng rng(seed);
  for (std::size_t i = 0; i < results_a.size(); ++i) {
    const TranslationResult* first = &results_a[i];
    const TranslationResult* second = b_by_task.at(first->task.id);
    if (first->task.source_sentence != second->task.source_sentence)
      throw InputError("paired results for task '" + first->task.id + "' translate different sentences");
    if (rng.coin()) std::swap(first, second);

    char id[32];
    std::snprintf(id, sizeof id, "task-%04zu", i + 1);
    HumanTask task{id, first->task.source_sentence, first->task.idiom_surface,
                   first->task.idiom_meaning_en, {}};
    const auto prompt_for = [](const TranslationResult& r) {
      return judge_task_prompt(uses_idiom_prompt(r), language_bindings(r.task));
    };
    task.translations.push_back({"A", first->translation, prompt_for(*first)});
    task.translations.push_back({"B", second->translation, prompt_for(*second)});
    out.blind_map[id]["A"] = {first->result_id, first->translator_model};
    out.blind_map[id]["B"] = {second->result_id, second->translator_model};
    out.tasks.push_back(std::move(task));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Import

struct HumanScoreRow {
  std::string task_id;
  std::string label;
  int score = 0;
  std::string annotator;
};

struct HumanImport {
  std::vector<ScoreRecord> records;
  std::vector<RowError> errors;
  std::map<std::string, std::string> annotator_ids;  // raw annotator -> anonymous id
};

inline constexpr std::string_view kScoreCsvHeader = "task_id,label,score,annotator";

inline std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string format_score_row(const HumanScoreRow& row) {
  return csv_escape(row.task_id) + "," + csv_escape(row.label) + "," + std::to_string(row.score) +
         "," + csv_escape(row.annotator) + "\n";
}

// Reads `task_id,label,score,annotator` rows (optional header line). Rows are
// resolved through the blind map; for a repeated (task, label, annotator) the
// last row wins. Annotators get anonymous ids a1, a2, ... in order of first
// appearance and their records the judge "human:<id>".
inline HumanImport import_human_scores(std::string_view csv, const BlindMap& blind_map) {
  if (!text::is_valid_utf8(csv)) throw ParseError("score file is not valid UTF-8");
  HumanImport out;
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> slot;
  const auto records = detail::read_csv(detail::strip_bom(csv));
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (r == 0 && rec.fields.size() == 4 && rec.fields[0] == "task_id") continue;
    const auto fail = [&](std::string msg) { out.errors.push_back({rec.line, std::move(msg)}); };
    if (!rec.ok) {
      fail(rec.error);
      continue;
    }
    if (rec.fields.size() != 4) {
      fail("expected 4 columns (task_id,label,score,annotator)");
      continue;
    }
    const std::string task_id = text::trim(rec.fields[0]);
    const std::string label = text::trim(rec.fields[1]);
    const std::string score_text = text::trim(rec.fields[2]);
    const std::string annotator = text::trim(rec.fields[3]);
    if (score_text != "1" && score_text != "2" && score_text != "3") {
      fail("score '" + score_text + "' is not 1, 2 or 3");
      continue;
    }
    auto task = blind_map.find(task_id);
    if (task == blind_map.end()) {
      fail("unknown task_id '" + task_id + "'");
      continue;
    }
    auto entry = task->second.find(label);
    if (entry == task->second.end()) {
      fail("task '" + task_id + "' has no label '" + label + "' in the blind map");
      continue;
    }
    if (annotator.empty()) {
      fail("annotator is empty");
      continue;
    }
    auto [anon, inserted] = out.annotator_ids.try_emplace(annotator, "");
    if (inserted) anon->second = "a" + std::to_string(out.annotator_ids.size());
    ScoreRecord record{entry->second.result_ref, std::string(kHumanJudgePrefix) + anon->second,
                       score_text[0] - '0', std::nullopt, record_timestamp()};
    auto key = std::make_tuple(task_id, label, annotator);
    if (auto it = slot.find(key); it != slot.end()) {
      out.records[it->second] = std::move(record);
    } else {
      slot.emplace(key, out.records.size());
      out.records.push_back(std::move(record));
    }
  }
  return out;
}

}  // namespace idiomalign

#endif  // IDIOMALIGN_HUMAN_EVAL_HPP_
