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

// Markdown reports over translation results and score records.

#ifndef IDIOMALIGN_REPORT_HPP_
#define IDIOMALIGN_REPORT_HPP_

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "idiomalign/evaluation.hpp"
#include "idiomalign/language.hpp"
#include "idiomalign/results.hpp"
#include "idiomalign/text.hpp"

namespace idiomalign {

namespace report_detail {

inline std::string mean_or_na(std::optional<double> m) { return m ? display_mean(*m) : "n/a"; }

inline std::string table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows) {
  std::string out = "| " + text::join(header, " | ") + " |\n|";
  for (std::size_t i = 0; i < header.size(); ++i) out += " --- |";
  out += "\n";
  for (const auto& row : rows) out += "| " + text::join(row, " | ") + " |\n";
  return out;
}

// "en-zh" -> "EN → ZH"
inline std::string direction_label(const Direction& d) {
  const auto upper = [](std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
  };
  return upper(d.source) + " → " + upper(d.target);
}

inline std::string method_label(Method m) {
  switch (m) {
    case Method::kSia: return "SIA";
    case Method::kLia: return "LIA";
    case Method::kDirect: return "Direct Translation";
  }
  return "?";
}

}  // namespace report_detail

// Scores per (translator, judge) for one direction and method.
struct ModelPairScores {
  std::string translator;
  std::string judge;
  PathSplit split;
};

inline std::vector<ModelPairScores> model_pair_scores(const std::vector<ScoreRecord>& records,
                                                      const std::vector<TranslationResult>& results,
                                                      const std::string& direction, Method method) {
  const auto by_id = detail::index_results(results);
  std::map<std::pair<std::string, std::string>, PathSplit> pairs;
  for (const auto& s : records) {
    if (s.is_human()) continue;
    auto it = by_id.find(s.result_ref);
    if (it == by_id.end()) throw InputError("score refers to unknown result '" + s.result_ref + "'");
    const auto& r = *it->second;
    if (r.method != method || r.task.direction().str() != direction) continue;
    auto& split = pairs[{r.translator_model, s.judge}];
    if (r.path == Path::kIdiomMatch) {
      ++split.idiom_count;
      split.idiom_sum += s.score;
    } else {
      ++split.no_idiom_count;
      split.no_idiom_sum += s.score;
    }
  }
  std::vector<ModelPairScores> out;
  for (auto& [key, split] : pairs) out.push_back({key.first, key.second, split});
  return out;
}

// One human score per result: the annotator whose anonymous id sorts first
// (a1 before a2) wins when several scored the same result.
inline std::vector<ScoreRecord> primary_human_scores(const std::vector<ScoreRecord>& records) {
  std::map<std::string, const ScoreRecord*> chosen;
  const auto anon_rank = [](const std::string& judge) {
    const auto id = judge.substr(kHumanJudgePrefix.size());
    std::size_t n = 0;
    bool numeric = id.size() > 1 && id[0] == 'a';
    for (std::size_t i = 1; numeric && i < id.size(); ++i) {
      if (id[i] < '0' || id[i] > '9') numeric = false;
      else n = n * 10 + static_cast<std::size_t>(id[i] - '0');
    }
    return std::make_tuple(!numeric, n, id);
  };
  for (const auto& s : records) {
    if (!s.is_human()) continue;
    auto [it, inserted] = chosen.try_emplace(s.result_ref, &s);
    if (!inserted && anon_rank(s.judge) < anon_rank(it->second->judge)) it->second = &s;
  }
  std::vector<ScoreRecord> out;
  for (const auto& [_, s] : chosen) out.push_back(*s);
  return out;
}

inline std::string render_report(const std::vector<TranslationResult>& results,
                                 const std::vector<ScoreRecord>& records) {
  using report_detail::mean_or_na;
  using report_detail::table;
  const auto by_id = detail::index_results(results);
  for (const auto& s : records)
    if (!by_id.contains(s.result_ref))
      throw InputError("score refers to unknown result '" + s.result_ref + "'");

  std::set<std::string> directions;
  for (const auto& r : results) directions.insert(r.task.direction().str());

  std::string out = "# Evaluation report\n";
  for (const auto& dir : directions) {
    const auto label = report_detail::direction_label(Direction::parse(dir));
    for (Method m : {Method::kSia, Method::kLia, Method::kDirect}) {
      std::vector<TranslationResult> subset;
      for (const auto& r : results)
        if (r.method == m && r.task.direction().str() == dir) subset.push_back(r);
      if (subset.empty()) continue;
      out += "\n## " + report_detail::method_label(m) + " (" + label + ")\n\n";
      const auto pairs = model_pair_scores(records, results, dir, m);

      if (m == Method::kSia) {
        std::map<std::string, std::vector<TranslationResult>> by_translator;
        for (const auto& r : subset) by_translator[r.translator_model].push_back(r);
        for (const auto& [model, rs] : by_translator) {
          const auto st = match_statistics(rs);
          out += "Match statistics (" + model + "): matched " + std::to_string(st.matched) +
                 ", unmatched " + std::to_string(st.unmatched) + ", total " +
                 std::to_string(st.total()) + "\n";
        }
        out += "\n";
        std::vector<std::vector<std::string>> rows;
        for (const auto& p : pairs)
          rows.push_back({p.translator, p.judge, mean_or_na(p.split.idiom_mean()),
                          mean_or_na(p.split.no_idiom_mean())});
        out += table({"Translation Model", "Evaluation Model", "Cosine Evaluations",
                      "Non-Cosine Evaluations"},
                     rows);
      } else if (m == Method::kLia) {
        std::vector<std::vector<std::string>> rows;
        for (const auto& p : pairs)
          rows.push_back({p.translator, p.judge, p.split.ratio(), mean_or_na(p.split.no_idiom_mean()),
                          mean_or_na(p.split.idiom_mean()), mean_or_na(p.split.total_mean())});
        out += table({"Translation Model", "Evaluation Model", "Idiom:No Idiom Ratio",
                      "No Idiom Eval.", "Idiom Eval.", "Total Avg Score"},
                     rows);
      } else {
        std::vector<std::vector<std::string>> rows;
        for (const auto& p : pairs)
          rows.push_back({p.translator, p.judge, mean_or_na(p.split.total_mean())});
        out += table({"Translation Model", "Evaluation Model", "Average Score"}, rows);
      }
    }
  }

  const auto human = primary_human_scores(records);
  if (!human.empty()) {
    std::map<std::tuple<std::string, std::string, Method>, std::pair<std::size_t, long long>> groups;
    for (const auto& s : human) {
      const auto& r = *by_id.at(s.result_ref);
      auto& g = groups[{r.task.direction().str(), r.translator_model, r.method}];
      ++g.first;
      g.second += s.score;
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& [key, g] : groups) {
      const auto& [dir, model, method] = key;
      rows.push_back({report_detail::direction_label(Direction::parse(dir)) + " " + model,
                      report_detail::method_label(method),
                      display_mean(static_cast<double>(g.second) / static_cast<double>(g.first))});
    }
    out += "\n## Human evaluations\n\n";
    out += table({"Translation Direction and Model", "Method Used", "Average Score"}, rows);

    std::set<std::string> judges;
    for (const auto& s : records)
      if (!s.is_human()) judges.insert(s.judge);
    std::set<std::string> human_refs;
    for (const auto& h : human) human_refs.insert(h.result_ref);
    std::vector<std::vector<std::string>> agreement_rows;
    for (const auto& judge : judges) {
      std::vector<ScoreRecord> judge_scores;
      for (const auto& s : records)
        if (s.judge == judge && human_refs.contains(s.result_ref)) judge_scores.push_back(s);
      if (judge_scores.empty()) continue;
      const auto a = exact_match_rate(judge_scores, human);
      agreement_rows.push_back({judge, std::to_string(a.agreed) + "/" + std::to_string(a.compared),
                                display_mean(a.rate)});
    }
    if (!agreement_rows.empty()) {
      out += "\n## Exact-match rate against human scores\n\n";
      out += table({"Evaluation Model", "Matches", "Exact-Match Rate"}, agreement_rows);
    }
  }
  return out;
}

}  // namespace idiomalign

#endif  // IDIOMALIGN_REPORT_HPP_
