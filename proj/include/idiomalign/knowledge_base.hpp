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

// Idiom records and the meaning-keyed knowledge base.
//
// Two source layouts are understood:
//   idiomkb_csv  - id,idiom,meaning_en,meaning_native (no header unless asked)
//   idiom_jsonl  - one IdiomEntry object per line, unknown fields ignored
// Every entry carries an English meaning; entries from all languages that
// share a normalized English meaning land in the same bucket, which is what
// makes cross-language alignment a key lookup or a vector search over keys.

#ifndef IDIOMALIGN_KNOWLEDGE_BASE_HPP_
#define IDIOMALIGN_KNOWLEDGE_BASE_HPP_

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "idiomalign/error.hpp"
#include "idiomalign/language.hpp"
#include "idiomalign/text.hpp"

namespace idiomalign {

enum class SentenceProvenance { kOriginal, kLlmGenerated };

inline std::string_view to_string(SentenceProvenance p) {
  return p == SentenceProvenance::kOriginal ? "original" : "llm_generated";
}

inline SentenceProvenance parse_provenance(std::string_view s) {
  if (s == "original") return SentenceProvenance::kOriginal;
  if (s == "llm_generated") return SentenceProvenance::kLlmGenerated;
  throw ParseError("unknown sentence provenance '" + std::string(s) + "'");
}

struct IdiomEntry {
  std::string id;
  std::string language;
  std::string idiom;
  std::string meaning_en;
  std::optional<std::string> meaning_native;
  std::vector<std::string> sentences;
  // Parallel to `sentences`.
  std::vector<SentenceProvenance> sentence_provenance;

  friend bool operator==(const IdiomEntry&, const IdiomEntry&) = default;
};

enum class RecordFormat { kIdiomKbCsv, kIdiomJsonl };

inline RecordFormat parse_record_format(std::string_view s) {
  if (s == "idiomkb_csv") return RecordFormat::kIdiomKbCsv;
  if (s == "idiom_jsonl") return RecordFormat::kIdiomJsonl;
  throw InputError("unknown record format '" + std::string(s) +
                   "' (expected idiomkb_csv or idiom_jsonl)");
}

struct RowError {
  std::size_t line = 0;  // 1-based line where the record starts
  std::string message;
};

struct ParseReport {
  std::size_t records_seen = 0;
  std::vector<RowError> errors;
};

struct ParsedRecords {
  std::vector<IdiomEntry> entries;
  ParseReport report;
};

struct ParseOptions {
  bool csv_header = false;  // skip the first CSV record
};

// ---------------------------------------------------------------------------
// Meaning keys

// Lowercases (ASCII), collapses whitespace runs, and strips ASCII punctuation
// and whitespace from both ends. Idempotent.
inline std::string normalize_meaning_key(std::string_view text) {
  std::string s = text::collapse_whitespace(text::to_lower_ascii(text));
  std::size_t b = 0;
  std::size_t e = s.size();
  const auto strip = [](char c) { return text::is_ascii_punct(c) || text::is_ascii_space(c); };
  while (b < e && strip(s[b])) ++b;
  while (e > b && strip(s[e - 1])) --e;
  return s.substr(b, e - b);
}

// ---------------------------------------------------------------------------
// JSON mapping

inline nlohmann::json entry_to_json(const IdiomEntry& e) {
  nlohmann::json j;
  j["id"] = e.id;
  j["language"] = e.language;
  j["idiom"] = e.idiom;
  j["meaning_en"] = e.meaning_en;
  j["meaning_native"] = e.meaning_native ? nlohmann::json(*e.meaning_native) : nlohmann::json();
  j["sentences"] = e.sentences;
  auto prov = nlohmann::json::array();
  for (auto p : e.sentence_provenance) prov.push_back(to_string(p));
  j["sentence_provenance"] = std::move(prov);
  return j;
}

namespace detail {

inline std::string required_string(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
  if (!it->is_string()) throw ParseError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

}  // namespace detail

// `default_language` fills in entries whose object has no "language" field.
inline IdiomEntry entry_from_json(const nlohmann::json& j, std::string_view default_language) {
  if (!j.is_object()) throw ParseError("record is not a JSON object");
  IdiomEntry e;
  auto id = j.find("id");
  if (id == j.end()) throw ParseError("missing field 'id'");
  if (id->is_string())
    e.id = id->get<std::string>();
  else if (id->is_number_integer())
    e.id = std::to_string(id->get<long long>());
  else
    throw ParseError("field 'id' must be a string or integer");

  if (auto lang = j.find("language"); lang != j.end() && !lang->is_null()) {
    if (!lang->is_string()) throw ParseError("field 'language' must be a string");
    e.language = lang->get<std::string>();
  } else {
    e.language = std::string(default_language);
  }
  e.idiom = detail::required_string(j, "idiom");
  e.meaning_en = detail::required_string(j, "meaning_en");
  if (auto mn = j.find("meaning_native"); mn != j.end() && !mn->is_null()) {
    if (!mn->is_string()) throw ParseError("field 'meaning_native' must be a string");
    e.meaning_native = mn->get<std::string>();
  }
  if (auto s = j.find("sentences"); s != j.end() && !s->is_null()) {
    if (!s->is_array()) throw ParseError("field 'sentences' must be an array");
    for (const auto& item : *s) {
      if (!item.is_string()) throw ParseError("sentences must be strings");
      e.sentences.push_back(item.get<std::string>());
    }
  }
  if (auto p = j.find("sentence_provenance"); p != j.end() && !p->is_null()) {
    if (!p->is_array()) throw ParseError("field 'sentence_provenance' must be an array");
    for (const auto& item : *p) {
      if (!item.is_string()) throw ParseError("sentence_provenance items must be strings");
      e.sentence_provenance.push_back(parse_provenance(item.get<std::string>()));
    }
    if (e.sentence_provenance.size() != e.sentences.size())
      throw ParseError("sentence_provenance length differs from sentences");
  } else {
    e.sentence_provenance.assign(e.sentences.size(), SentenceProvenance::kOriginal);
  }
  return e;
}

inline std::string serialize_jsonl(const std::vector<IdiomEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    out += entry_to_json(e).dump();
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

struct CsvRecord {
  std::size_t line = 0;
  std::vector<std::string> fields;
  bool ok = true;
  std::string error;
};

// RFC 4180 reader: quoted fields may contain commas, doubled quotes, and
// newlines. Records are separated by LF or CRLF.
inline std::vector<CsvRecord> read_csv(std::string_view data) {
  std::vector<CsvRecord> records;
  std::size_t i = 0;
  std::size_t line = 1;
  while (i < data.size()) {
    CsvRecord rec;
    rec.line = line;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    bool done = false;
    while (!done) {
      if (i >= data.size()) {
        if (in_quotes) {
          rec.ok = false;
          rec.error = "unterminated quoted field";
        }
        rec.fields.push_back(std::move(field));
        break;
      }
      const char c = data[i];
      if (in_quotes) {
        if (c == '"') {
          if (i + 1 < data.size() && data[i + 1] == '"') {
            field.push_back('"');
            i += 2;
          } else {
            in_quotes = false;
            ++i;
          }
        } else {
          if (c == '\n') ++line;
          field.push_back(c);
          ++i;
        }
        continue;
      }
      switch (c) {
        case '"':
          if (field.empty() && !field_was_quoted) {
            in_quotes = true;
            field_was_quoted = true;
          } else {
            rec.ok = false;
            rec.error = "stray quote inside unquoted field";
            field.push_back(c);
          }
          ++i;
          break;
        case ',':
          rec.fields.push_back(std::move(field));
          field.clear();
          field_was_quoted = false;
          ++i;
          break;
        case '\r':
          ++i;
          break;
        case '\n':
          rec.fields.push_back(std::move(field));
          ++i;
          ++line;
          done = true;
          break;
        default:
          field.push_back(c);
          ++i;
      }
    }
    const bool empty_row = rec.fields.size() == 1 && rec.fields[0].empty() && rec.ok;
    if (!empty_row) records.push_back(std::move(rec));
  }
  return records;
}

inline std::string_view strip_bom(std::string_view s) {
  if (s.size() >= 3 && s.substr(0, 3) == "\xEF\xBB\xBF") s.remove_prefix(3);
  return s;
}

}  // namespace detail

// Parses one file's content. Malformed rows are reported, not fatal, unless
// more than half of the rows are malformed or the bytes are not UTF-8.
inline ParsedRecords parse_idiom_records(std::string_view bytes, RecordFormat format,
                                         std::string_view language,
                                         const ParseOptions& options = {}) {
  if (!text::is_valid_utf8(bytes)) throw ParseError("input is not valid UTF-8");
  bytes = detail::strip_bom(bytes);
  ParsedRecords out;

  if (format == RecordFormat::kIdiomKbCsv) {
    auto records = detail::read_csv(bytes);
    std::size_t first = options.csv_header && !records.empty() ? 1 : 0;
    for (std::size_t r = first; r < records.size(); ++r) {
      auto& rec = records[r];
      ++out.report.records_seen;
      if (!rec.ok) {
        out.report.errors.push_back({rec.line, rec.error});
        continue;
      }
      if (rec.fields.size() < 3 || rec.fields.size() > 4) {
        out.report.errors.push_back(
            {rec.line, "expected 3 or 4 columns (id,idiom,meaning_en[,meaning_native]), got " +
                           std::to_string(rec.fields.size())});
        continue;
      }
      IdiomEntry e;
      e.id = text::trim(rec.fields[0]);
      e.language = std::string(language);
      e.idiom = std::move(rec.fields[1]);
      e.meaning_en = std::move(rec.fields[2]);
      if (rec.fields.size() == 4 && !text::is_blank(rec.fields[3]))
        e.meaning_native = std::move(rec.fields[3]);
      out.entries.push_back(std::move(e));
    }
  } else {
    const auto lines = text::split_lines(bytes);
    for (std::size_t n = 0; n < lines.size(); ++n) {
      if (text::is_blank(lines[n])) continue;
      ++out.report.records_seen;
      try {
        auto j = nlohmann::json::parse(lines[n]);
        out.entries.push_back(entry_from_json(j, language));
      } catch (const nlohmann::json::exception& ex) {
        out.report.errors.push_back({n + 1, std::string("invalid JSON: ") + ex.what()});
      } catch (const ParseError& ex) {
        out.report.errors.push_back({n + 1, ex.what()});
      }
    }
  }

  if (out.report.errors.size() * 2 > out.report.records_seen) {
    const auto& first_error = out.report.errors.front();
    throw ParseError(std::to_string(out.report.errors.size()) + " of " +
                     std::to_string(out.report.records_seen) +
                     " records are malformed; first at line " + std::to_string(first_error.line) +
                     ": " + first_error.message);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Knowledge base

// Drop counts keyed by language code, plus "invalid" for entries that failed
// validation.
class DedupReport {
 public:
  static constexpr std::string_view kInvalid = "invalid";

  std::size_t count(std::string_view key) const {
    auto it = counts_.find(std::string(key));
    return it == counts_.end() ? 0 : it->second;
  }
  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& [_, n] : counts_) t += n;
    return t;
  }
  const std::map<std::string, std::size_t>& counts() const { return counts_; }

  void touch(const std::string& key) { counts_.try_emplace(key, 0); }
  void add(const std::string& key) { ++counts_[key]; }

 private:
  std::map<std::string, std::size_t> counts_;
};

struct BuildOptions {
  std::vector<std::string> languages = default_language_codes();
};

class KnowledgeBase;
inline KnowledgeBase build_knowledge_base(std::vector<IdiomEntry> entries,
                                          const BuildOptions& options = {});

class KnowledgeBase {
 public:
  KnowledgeBase() = default;

  const std::vector<IdiomEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const DedupReport& dedup_report() const { return dedup_; }

  // Entries (any language) whose normalized English meaning equals `key`.
  // `key` is normalized before lookup.
  std::vector<const IdiomEntry*> by_meaning_key(std::string_view key) const {
    std::vector<const IdiomEntry*> out;
    auto it = by_meaning_.find(normalize_meaning_key(key));
    if (it == by_meaning_.end()) return out;
    for (auto idx : it->second) out.push_back(&entries_[idx]);
    return out;
  }

  const IdiomEntry* find(std::string_view language, std::string_view idiom) const {
    auto it = by_surface_.find({std::string(language), text::trim(idiom)});
    return it == by_surface_.end() ? nullptr : &entries_[it->second];
  }

  const IdiomEntry* find_by_id(std::string_view language, std::string_view id) const {
    for (const auto& e : entries_)
      if (e.language == language && e.id == id) return &e;
    return nullptr;
  }

  std::vector<const IdiomEntry*> in_language(std::string_view language) const {
    std::vector<const IdiomEntry*> out;
    for (const auto& e : entries_)
      if (e.language == language) out.push_back(&e);
    return out;
  }

  std::size_t meaning_key_count() const { return by_meaning_.size(); }

 private:
  friend KnowledgeBase build_knowledge_base(std::vector<IdiomEntry>, const BuildOptions&);

  std::vector<IdiomEntry> entries_;
  std::map<std::string, std::vector<std::size_t>> by_meaning_;
  std::map<std::pair<std::string, std::string>, std::size_t> by_surface_;
  DedupReport dedup_;
};

// Collapses exact (language, trimmed idiom) duplicates, first occurrence wins
// and absorbs the duplicates' sentences. Entries with an empty idiom or
// meaning, or a language outside `options.languages`, are dropped as invalid.
inline KnowledgeBase build_knowledge_base(std::vector<IdiomEntry> entries,
                                          const BuildOptions& options) {
  KnowledgeBase kb;
  const std::set<std::string> allowed(options.languages.begin(), options.languages.end());
  for (const auto& l : options.languages) kb.dedup_.touch(l);
  kb.dedup_.touch(std::string(DedupReport::kInvalid));

  for (auto& e : entries) {
    e.idiom = text::trim(e.idiom);
    e.meaning_en = text::trim(e.meaning_en);
    if (e.sentence_provenance.size() < e.sentences.size())
      e.sentence_provenance.resize(e.sentences.size(), SentenceProvenance::kOriginal);
    if (e.idiom.empty() || e.meaning_en.empty() || !allowed.contains(e.language)) {
      kb.dedup_.add(std::string(DedupReport::kInvalid));
      continue;
    }
    auto key = std::make_pair(e.language, e.idiom);
    if (auto it = kb.by_surface_.find(key); it != kb.by_surface_.end()) {
      IdiomEntry& kept = kb.entries_[it->second];
      for (std::size_t s = 0; s < e.sentences.size(); ++s) {
        if (std::find(kept.sentences.begin(), kept.sentences.end(), e.sentences[s]) ==
            kept.sentences.end()) {
          kept.sentences.push_back(e.sentences[s]);
          kept.sentence_provenance.push_back(e.sentence_provenance[s]);
        }
      }
      kb.dedup_.add(e.language);
      continue;
    }
    // Duplicate sentences inside one record are collapsed too.
    IdiomEntry clean = e;
    clean.sentences.clear();
    clean.sentence_provenance.clear();
    for (std::size_t s = 0; s < e.sentences.size(); ++s) {
      if (std::find(clean.sentences.begin(), clean.sentences.end(), e.sentences[s]) ==
          clean.sentences.end()) {
        clean.sentences.push_back(e.sentences[s]);
        clean.sentence_provenance.push_back(e.sentence_provenance[s]);
      }
    }
    kb.by_surface_.emplace(std::move(key), kb.entries_.size());
    kb.entries_.push_back(std::move(clean));
  }
  for (std::size_t i = 0; i < kb.entries_.size(); ++i)
    kb.by_meaning_[normalize_meaning_key(kb.entries_[i].meaning_en)].push_back(i);
  return kb;
}

inline std::optional<std::string> lookup_meaning(const KnowledgeBase& kb,
                                                 std::string_view language,
                                                 std::string_view idiom) {
  if (const IdiomEntry* e = kb.find(language, idiom)) return e->meaning_en;
  return std::nullopt;
}

// Orders entry ids so that purely numeric ids sort numerically ("7" < "10")
// and everything else sorts by bytes.
inline bool entry_id_less(std::string_view a, std::string_view b) {
  const auto numeric = [](std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if (numeric(a) && numeric(b)) {
    const auto strip = [](std::string_view s) {
      while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
      return s;
    };
    a = strip(a);
    b = strip(b);
    if (a.size() != b.size()) return a.size() < b.size();
  }
  return a < b;
}

}  // namespace idiomalign

#endif  // IDIOMALIGN_KNOWLEDGE_BASE_HPP_
