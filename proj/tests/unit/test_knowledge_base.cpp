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

#include <random>

#include <gtest/gtest.h>

#include "idiomalign/knowledge_base.hpp"
#include "test_util.hpp"

namespace idiomalign {
namespace {

IdiomEntry entry(std::string id, std::string lang, std::string idiom, std::string meaning) {
  IdiomEntry e;
  e.id = std::move(id);
  e.language = std::move(lang);
  e.idiom = std::move(idiom);
  e.meaning_en = std::move(meaning);
  return e;
}

TEST(ParseCsv, FourColumnRow) {
  const auto parsed = parse_idiom_records("7,坐失良机,miss a great opportunity,错过良好的机会\n",
                                          RecordFormat::kIdiomKbCsv, "zh");
  ASSERT_EQ(parsed.entries.size(), 1u);
  const auto& e = parsed.entries[0];
  EXPECT_EQ(e.id, "7");
  EXPECT_EQ(e.language, "zh");
  EXPECT_EQ(e.idiom, "坐失良机");
  EXPECT_EQ(e.meaning_en, "miss a great opportunity");
  EXPECT_EQ(e.meaning_native, "错过良好的机会");
  EXPECT_TRUE(e.sentences.empty());
  EXPECT_TRUE(parsed.report.errors.empty());
}

TEST(ParseCsv, EmptyFile) {
  const auto parsed = parse_idiom_records("", RecordFormat::kIdiomKbCsv, "zh");
  EXPECT_TRUE(parsed.entries.empty());
  EXPECT_EQ(parsed.report.records_seen, 0u);
  EXPECT_TRUE(parsed.report.errors.empty());
}

TEST(ParseCsv, QuotedFieldsHeaderAndBom) {
  const std::string csv =
      "\xEF\xBB\xBFid,idiom,meaning_en\r\n"
      "1,\"break a leg\",\"good luck, said before a show\"\r\n"
      "2,\"say \"\"cheese\"\"\",smile for a photo\r\n";
  ParseOptions opts;
  opts.csv_header = true;
  const auto parsed = parse_idiom_records(csv, RecordFormat::kIdiomKbCsv, "en", opts);
  ASSERT_EQ(parsed.entries.size(), 2u);
  EXPECT_EQ(parsed.entries[0].meaning_en, "good luck, said before a show");
  EXPECT_EQ(parsed.entries[1].idiom, "say \"cheese\"");
  EXPECT_FALSE(parsed.entries[0].meaning_native.has_value());
}

TEST(ParseCsv, MalformedRowsAreReportedWithLineNumbers) {
  const auto parsed = parse_idiom_records("1,a,b\n2,only-two\n3,c,d\n", RecordFormat::kIdiomKbCsv, "en");
  EXPECT_EQ(parsed.entries.size(), 2u);
  ASSERT_EQ(parsed.report.errors.size(), 1u);
  EXPECT_EQ(parsed.report.errors[0].line, 2u);
}

TEST(ParseCsv, MajorityMalformedRejectsFile) {
  EXPECT_THROW(parse_idiom_records("1,a,b\n2\n3\n", RecordFormat::kIdiomKbCsv, "en"), ParseError);
  // Exactly half is still accepted.
  EXPECT_NO_THROW(parse_idiom_records("1,a,b\n2\n", RecordFormat::kIdiomKbCsv, "en"));
}

TEST(ParseCsv, InvalidUtf8Rejected) {
  EXPECT_THROW(parse_idiom_records("1,\xff\xfe,b\n", RecordFormat::kIdiomKbCsv, "en"), ParseError);
}

TEST(ParseJsonl, EntryWithSentencesAndUnknownFields) {
  const std::string line =
      R"({"id":"e1","language":"en","idiom":"zip one's lips","meaning_en":"to remain silent or keep a secret",)"
      R"("sentences":["Zip your lips.","She zipped her lips."],"sentence_provenance":["original","llm_generated"],"extra":1})";
  const auto parsed = parse_idiom_records(line + "\n\n", RecordFormat::kIdiomJsonl, "en");
  ASSERT_EQ(parsed.entries.size(), 1u);
  const auto& e = parsed.entries[0];
  EXPECT_EQ(e.idiom, "zip one's lips");
  EXPECT_EQ(e.meaning_en, "to remain silent or keep a secret");
  ASSERT_EQ(e.sentence_provenance.size(), 2u);
  EXPECT_EQ(e.sentence_provenance[1], SentenceProvenance::kLlmGenerated);
}

TEST(ParseJsonl, ProvenanceDefaultsToOriginal) {
  const auto parsed = parse_idiom_records(R"({"id":1,"idiom":"x","meaning_en":"y","sentences":["s"]})",
                                          RecordFormat::kIdiomJsonl, "hi");
  ASSERT_EQ(parsed.entries.size(), 1u);
  EXPECT_EQ(parsed.entries[0].id, "1");
  EXPECT_EQ(parsed.entries[0].language, "hi");
  EXPECT_EQ(parsed.entries[0].sentence_provenance, std::vector{SentenceProvenance::kOriginal});
}

TEST(ParseJsonl, RoundTrip) {
  auto a = entry("3", "zh", "坐失良机", "miss a great opportunity");
  a.meaning_native = "错过良好的机会";
  a.sentences = {"他坐失良机。"};
  a.sentence_provenance = {SentenceProvenance::kLlmGenerated};
  const auto b = entry("4", "en", "zip one's lips", "to remain silent");
  const auto parsed = parse_idiom_records(serialize_jsonl({a, b}), RecordFormat::kIdiomJsonl, "en");
  ASSERT_EQ(parsed.entries.size(), 2u);
  EXPECT_EQ(parsed.entries[0], a);
  auto b_expected = b;
  EXPECT_EQ(parsed.entries[1], b_expected);
}

TEST(NormalizeMeaningKey, Examples) {
  EXPECT_EQ(normalize_meaning_key("  Miss a Great Opportunity. "), "miss a great opportunity");
  EXPECT_EQ(normalize_meaning_key("miss a great opportunity"), "miss a great opportunity");
  EXPECT_EQ(normalize_meaning_key(""), "");
  EXPECT_EQ(normalize_meaning_key("\"to die!\""), "to die");
  EXPECT_EQ(normalize_meaning_key("keep one's lips sealed, remain silent"),
            "keep one's lips sealed, remain silent");
}

TEST(NormalizeMeaningKey, IdempotentOnRandomStrings) {
  const std::string alphabet = " \t\n.,;!?'\"-aAbBzZ09\xe4\xb8\xad";
  std::mt19937 rng(11);
  for (int i = 0; i < 5000; ++i) {
    std::string s;
    const int len = static_cast<int>(rng() % 24);
    for (int j = 0; j < len; ++j) s.push_back(alphabet[rng() % alphabet.size()]);
    const auto once = normalize_meaning_key(s);
    ASSERT_EQ(normalize_meaning_key(once), once) << "input: " << s;
  }
}

TEST(BuildKb, DuplicatesCollapseKeepingFirstAndMergingSentences) {
  auto a = entry("1", "zh", "坐失良机", "miss a great opportunity");
  a.sentences = {"s1"};
  auto b = entry("2", "zh", " 坐失良机 ", "a different meaning");
  b.sentences = {"s1", "s2"};
  const auto kb = build_knowledge_base({a, b});
  ASSERT_EQ(kb.size(), 1u);
  EXPECT_EQ(kb.entries()[0].id, "1");
  EXPECT_EQ(kb.entries()[0].meaning_en, "miss a great opportunity");
  EXPECT_EQ(kb.entries()[0].sentences, (std::vector<std::string>{"s1", "s2"}));
  EXPECT_EQ(kb.dedup_report().count("zh"), 1u);
}

TEST(BuildKb, DistinctEntriesNoDrops) {
  const auto kb = build_knowledge_base({entry("1", "en", "a", "x"), entry("2", "en", "b", "y"),
                                        entry("3", "zh", "a", "x"), entry("4", "zh", "c", "z")});
  EXPECT_EQ(kb.size(), 4u);
  EXPECT_EQ(kb.dedup_report().total(), 0u);
  for (const auto& [lang, n] : kb.dedup_report().counts()) EXPECT_EQ(n, 0u) << lang;
}

TEST(BuildKb, InvalidEntriesCounted) {
  const auto kb = build_knowledge_base({entry("1", "en", "  ", "x"), entry("2", "en", "b", ""),
                                        entry("3", "fr", "c", "z"), entry("4", "en", "d", "w")});
  EXPECT_EQ(kb.size(), 1u);
  EXPECT_EQ(kb.dedup_report().count(DedupReport::kInvalid), 3u);
}

TEST(BuildKb, MeaningBucketsIgnoreCase) {
  const auto kb = build_knowledge_base({entry("1", "en", "keep mum", "Remain Silent."),
                                        entry("2", "zh", "缄口不言", "remain silent")});
  EXPECT_EQ(kb.by_meaning_key("remain silent").size(), 2u);
  EXPECT_EQ(kb.meaning_key_count(), 1u);
}

TEST(BuildKb, CountConservationAndLookupProperty) {
  std::mt19937 rng(5);
  const std::vector<std::string> langs{"en", "zh", "ur", "hi", "xx"};
  std::vector<IdiomEntry> input;
  for (int i = 0; i < 400; ++i)
    input.push_back(entry(std::to_string(i), langs[rng() % langs.size()],
                          rng() % 10 == 0 ? "" : "idiom" + std::to_string(rng() % 60),
                          "meaning " + std::to_string(rng() % 30)));
  const auto kb = build_knowledge_base(input);
  EXPECT_EQ(kb.size() + kb.dedup_report().total(), input.size());
  for (const auto& e : kb.entries()) {
    EXPECT_EQ(lookup_meaning(kb, e.language, e.idiom), e.meaning_en);
    const auto bucket = kb.by_meaning_key(e.meaning_en);
    EXPECT_NE(std::find(bucket.begin(), bucket.end(), &e), bucket.end());
  }
}

TEST(LookupMeaning, KeyedByLanguage) {
  const auto kb = build_knowledge_base({entry("7", "zh", "坐失良机", "miss a great opportunity"),
                                        entry("8", "en", "same", "english meaning"),
                                        entry("9", "hi", "same", "hindi meaning")});
  EXPECT_EQ(lookup_meaning(kb, "zh", "坐失良机"), "miss a great opportunity");
  EXPECT_EQ(lookup_meaning(kb, "hi", "same"), "hindi meaning");
  EXPECT_EQ(lookup_meaning(kb, "en", "same"), "english meaning");
  EXPECT_FALSE(lookup_meaning(kb, "zh", "unknown").has_value());
}

TEST(EntryIdLess, NumericThenBytes) {
  EXPECT_TRUE(entry_id_less("7", "10"));
  EXPECT_TRUE(entry_id_less("007", "10"));
  EXPECT_FALSE(entry_id_less("10", "7"));
  EXPECT_TRUE(entry_id_less("a10", "a7"));
}

}  // namespace
}  // namespace idiomalign
