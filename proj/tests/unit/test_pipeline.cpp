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

#include "idiomalign/pipeline.hpp"
#include "test_util.hpp"

namespace idiomalign {
namespace {

using testing::make_task;

IdiomEntry entry(std::string id, std::string lang, std::string idiom, std::string meaning) {
  IdiomEntry e;
  e.id = std::move(id);
  e.language = std::move(lang);
  e.idiom = std::move(idiom);
  e.meaning_en = std::move(meaning);
  return e;
}

PipelineConfig fast_config() {
  PipelineConfig c;
  c.retry_backoff = std::chrono::milliseconds(0);
  return c;
}

class SiaTest : public ::testing::Test {
 protected:
  SiaTest()
      : kb_(build_knowledge_base({entry("1", "zh", "缄口不言", "to remain silent or keep a secret"),
                                  entry("2", "zh", "目光如豆", "lacking in foresight")})),
        embedder_(64),
        index_(build_meaning_index(kb_, "zh", embedder_)),
        llm_("mock") {
    llm_.set_stage_default("sia_translate", "[{{target_language}}] {{sentence}} <{{target_idiom}}>");
  }

  KnowledgeBase kb_;
  TestEmbedder embedder_;
  MeaningIndex index_;
  ScriptedLlmClient llm_;
};

TEST_F(SiaTest, ConfirmedMatchUsesAlignedIdiom) {
  llm_.set_stage_default("sia_confirm", "The best match is 缄口不言.");
  const auto task = make_task("1#1");
  const auto r = run_sia(task, index_, embedder_, llm_, fast_config());
  EXPECT_EQ(r.path, Path::kIdiomMatch);
  EXPECT_EQ(r.matched_idiom, "缄口不言");
  ASSERT_EQ(r.candidates.size(), 1u);
  EXPECT_EQ(r.candidates[0].score, 1.0);
  EXPECT_TRUE(r.candidates[0].selected);
  EXPECT_EQ(r.translation, "[Chinese] He promised to zip his lips about the party. <缄口不言>");
  ASSERT_EQ(r.prompts.size(), 2u);
  EXPECT_EQ(r.prompts[0].stage, "sia_confirm");
  const std::vector<AlignmentCandidate> retrieved{{"1", "缄口不言", "to remain silent or keep a secret", 1.0}};
  EXPECT_EQ(r.prompts[0].prompt, render_sia_confirm(sia_confirm_bindings(task, retrieved)));
  EXPECT_EQ(r.result_id, "1#1/sia/mock");
  EXPECT_TRUE(r.flags.empty());
}

TEST_F(SiaTest, UnclearConfirmationFallsBackToTopCandidateWithFlag) {
  llm_.set_stage_default("sia_confirm", "None of these fit.");
  const auto r = run_sia(make_task("1#1"), index_, embedder_, llm_, fast_config());
  EXPECT_EQ(r.matched_idiom, "缄口不言");
  EXPECT_EQ(r.flags, std::vector<std::string>{"confirmation_mismatch"});
}

TEST_F(SiaTest, NoCandidateTranslatesWithMeaning) {
  auto task = make_task("1#1");
  task.idiom_meaning_en = "to be overjoyed";
  ASSERT_TRUE(retrieve_candidates(index_, embed_text(embedder_, "to be overjoyed"), {}).empty());
  const auto r = run_sia(task, index_, embedder_, llm_, fast_config());
  EXPECT_EQ(r.path, Path::kMeaningFallback);
  EXPECT_FALSE(r.matched_idiom.has_value());
  EXPECT_TRUE(r.candidates.empty());
  ASSERT_EQ(r.prompts.size(), 1u);
  EXPECT_EQ(r.translation, "[Chinese] He promised to zip his lips about the party. <to be overjoyed>");
}

TEST_F(SiaTest, MismatchedIndexRejected) {
  EXPECT_THROW(run_sia(make_task("1#1"), index_, TestEmbedder(32), llm_), ConfigError);
  EXPECT_THROW(run_sia(make_task("1#1", "en", "hi"), index_, embedder_, llm_), InputError);
}

TEST(Lia, GeneratedCandidatesAndSelection) {
  ScriptedLlmClient llm("mock");
  llm.set_stage_default("lia_generate", "1. 画蛇添足\n2. 对牛弹琴\n3. 井底之蛙");
  llm.set_stage_default("lia_select", "对牛弹琴 fits best.");
  llm.set_stage_default("lia_translate", "<{{target_idiom}}>");
  const auto r = run_lia(make_task("1#1"), llm, fast_config());
  EXPECT_EQ(r.path, Path::kIdiomMatch);
  EXPECT_EQ(r.matched_idiom, "对牛弹琴");
  ASSERT_EQ(r.candidates.size(), 3u);
  EXPECT_TRUE(r.candidates[1].selected);
  EXPECT_EQ(r.translation, "<对牛弹琴>");
  ASSERT_EQ(r.prompts.size(), 3u);
  // Without a definition in the response, the entry meaning is used.
  EXPECT_NE(r.prompts[1].prompt.find("English definition: 'to remain silent or keep a secret'"),
            std::string::npos);
}

TEST(Lia, DefinitionOnlyResponseTranslatesWithDefinition) {
  ScriptedLlmClient llm("mock");
  llm.set_stage_default("lia_generate", "Definition: to keep quiet. No Chinese idiom has the same meaning.");
  llm.set_stage_default("lia_translate", "<{{target_idiom}}>");
  const auto r = run_lia(make_task("1#1"), llm, fast_config());
  EXPECT_EQ(r.path, Path::kLlmNoCandidate);
  EXPECT_EQ(r.translation, "<to keep quiet.>");
  EXPECT_EQ(r.prompts.size(), 2u);
}

TEST(Lia, UnusableResponsesFailAfterOneReask) {
  ScriptedLlmClient llm("mock");
  llm.set_stage_default("lia_generate", "");
  try {
    run_lia(make_task("1#1"), llm, fast_config());
    FAIL() << "expected PipelineError";
  } catch (const PipelineError& ex) {
    EXPECT_EQ(ex.partial().prompts.size(), 2u);
    EXPECT_EQ(ex.partial().flags, std::vector<std::string>{"parse_warning"});
  }
}

TEST(LiaParse, ListFormats) {
  const auto p = parse_lia_response(
      "Definition: to keep a secret\n"
      "1. 守口如瓶 (shǒu kǒu rú píng) - keep a secret\n"
      "2) 「缄口不言」\n"
      "3、Chinese idiom 3: 闭口不言\n");
  EXPECT_EQ(p.candidates, (std::vector<std::string>{"守口如瓶", "缄口不言", "闭口不言"}));
  EXPECT_EQ(p.definition, "to keep a secret");
  EXPECT_FALSE(p.warning);
  EXPECT_EQ(parse_lia_candidates("1. Definition: x\n2. No Chinese idiom fits."), std::vector<std::string>{});
  EXPECT_EQ(parse_lia_candidates("守口如瓶\n守口如瓶\n"), std::vector<std::string>{"守口如瓶"});
  EXPECT_TRUE(parse_lia_response("").warning);
}

TEST(FindSelectedOption, SingleUnambiguousMention) {
  const std::vector<std::string> opts{"缄口不言", "守口如瓶"};
  EXPECT_EQ(find_selected_option("I pick 守口如瓶.", opts), 1u);
  EXPECT_FALSE(find_selected_option("缄口不言 or 守口如瓶", opts).has_value());
  EXPECT_FALSE(find_selected_option("neither", opts).has_value());
  EXPECT_EQ(find_selected_option("Spill The Beans", {"spill", "spill the beans"}), 1u);
}

TEST(Direct, BlankAnswerIsReaskedOnce) {
  ScriptedLlmClient llm("mock");
  const auto task = make_task("1#1");
  llm.set("direct_translate", direct_bindings(task), "   ");
  llm.set_stage_default("direct_translate", "他答应保密。");
  const auto r = run_direct(task, llm, fast_config());
  EXPECT_EQ(r.translation, "他答应保密。");
  ASSERT_EQ(r.prompts.size(), 2u);
  EXPECT_TRUE(r.prompts[1].prompt.ends_with(kTranslationReminder));

  ScriptedLlmClient silent("mock");
  silent.set_stage_default("direct_translate", "");
  EXPECT_THROW(run_direct(task, silent, fast_config()), PipelineError);
}

TEST(Batch, PartialFailuresKeepOrder) {
  ScriptedLlmClient llm("mock");
  llm.set_stage_default("direct_translate", "T {{sentence}}");
  std::vector<TranslationTask> tasks{make_task("1#1"), make_task("2#1"), make_task("3#1")};
  tasks[1].source_sentence = "He would zip his lips forever.";
  llm.set(script_key("direct_translate", direct_bindings(tasks[1])), {"", 0, true});
  BatchDependencies deps{&llm, nullptr, nullptr, fast_config()};
  deps.config.max_llm_retries = 2;
  const auto out = run_batch(tasks, Method::kDirect, deps);
  ASSERT_EQ(out.results.size(), 2u);
  EXPECT_EQ(out.results[0].task.id, "1#1");
  EXPECT_EQ(out.results[1].task.id, "3#1");
  ASSERT_EQ(out.failures.size(), 1u);
  EXPECT_EQ(out.failures[0].task_id, "2#1");
  EXPECT_EQ(out.failures[0].position, 1u);
  EXPECT_EQ(out.failures[0].attempts, 3);
  EXPECT_EQ(out.manifest.at("failure_count"), 1);
  EXPECT_EQ(out.manifest.at("method"), "direct");
}

TEST(Batch, ParallelMatchesSerial) {
  ScriptedLlmClient a("mock"), b("mock");
  a.set_stage_default("direct_translate", "T {{sentence}}");
  b.set_stage_default("direct_translate", "T {{sentence}}");
  std::vector<TranslationTask> tasks;
  for (int i = 1; i <= 40; ++i) {
    tasks.push_back(make_task(std::to_string(i) + "#1"));
    tasks.back().source_sentence = "Sentence " + std::to_string(i) + " where we zip his lips.";
  }
  BatchDependencies serial{&a, nullptr, nullptr, fast_config()};
  BatchDependencies parallel{&b, nullptr, nullptr, fast_config()};
  parallel.config.parallelism = 4;
  EXPECT_EQ(run_batch(tasks, Method::kDirect, serial).results,
            run_batch(tasks, Method::kDirect, parallel).results);
}

TEST(Batch, AllFailedAndMixedDirections) {
  ScriptedLlmClient llm("mock");
  BatchDependencies deps{&llm, nullptr, nullptr, fast_config()};
  try {
    run_batch({make_task("1#1")}, Method::kDirect, deps);
    FAIL() << "expected BatchError";
  } catch (const BatchError& ex) {
    EXPECT_EQ(ex.output().failures.size(), 1u);
  }
  EXPECT_THROW(run_batch({make_task("1#1"), make_task("2#1", "zh", "en")}, Method::kDirect, deps),
               InputError);
  EXPECT_THROW(run_batch({make_task("1#1")}, Method::kSia, deps), BatchError);
}

}  // namespace
}  // namespace idiomalign
