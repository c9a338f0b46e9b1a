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

// Thresholded top-k search over the English meanings of one language's idioms.
// The scan is exact; corpora here are at most a few thousand meanings.

#ifndef IDIOMALIGN_RETRIEVAL_HPP_
#define IDIOMALIGN_RETRIEVAL_HPP_

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "idiomalign/embedding.hpp"
#include "idiomalign/error.hpp"
#include "idiomalign/knowledge_base.hpp"

namespace idiomalign {

struct RetrievalConfig {
  double threshold = 0.7;  // inclusive
  std::size_t k = 4;

  void validate() const {
    if (!(threshold >= -1.0 && threshold <= 1.0))
      throw InputError("retrieval threshold must lie in [-1, 1]");
    if (k < 1) throw InputError("retrieval k must be at least 1");
  }
};

struct IndexItem {
  std::string entry_ref;  // IdiomEntry::id within the index's language
  std::string idiom;
  std::string meaning_en;
  std::string key_text;  // normalize_meaning_key(meaning_en)
  EmbeddingVector vector;

  friend bool operator==(const IndexItem&, const IndexItem&) = default;
};

struct MeaningIndex {
  std::string target_language;
  std::string provider_name;
  std::size_t dim = 0;
  std::vector<IndexItem> items;
  std::size_t excluded = 0;  // entries whose meaning normalized to nothing

  friend bool operator==(const MeaningIndex&, const MeaningIndex&) = default;
};

struct AlignmentCandidate {
  std::string entry_ref;
  std::string idiom;
  std::string meaning_en;
  double score = 0.0;

  friend bool operator==(const AlignmentCandidate&, const AlignmentCandidate&) = default;
};

inline MeaningIndex build_meaning_index(const KnowledgeBase& kb, std::string_view target_language,
                                        const EmbeddingProvider& provider) {
  auto entries = kb.in_language(target_language);
  if (entries.empty())
    throw InputError("knowledge base has no entries in language '" +
                     std::string(target_language) + "'");
  std::sort(entries.begin(), entries.end(), [](const IdiomEntry* a, const IdiomEntry* b) {
    if (a->id != b->id) return entry_id_less(a->id, b->id);
    return a->idiom < b->idiom;
  });

  MeaningIndex index;
  index.target_language = std::string(target_language);
  index.provider_name = provider.name();
  index.dim = provider.dim();

  std::vector<std::string> keys;
  for (const IdiomEntry* e : entries) {
    std::string key = normalize_meaning_key(e->meaning_en);
    if (key.empty()) {
      ++index.excluded;
      continue;
    }
    index.items.push_back({e->id, e->idiom, e->meaning_en, key, {}});
    keys.push_back(std::move(key));
  }
  if (index.items.empty())
    throw InputError("no embeddable meanings in language '" + std::string(target_language) + "'");

  std::vector<EmbeddingVector> vectors;
  try {
    vectors = embed_texts(provider, keys);
  } catch (const TransportError& ex) {
    throw TransportError("embedding meanings for index '" + std::string(target_language) +
                             "' failed: " + ex.what(),
                         ex.attempts());
  }
  for (std::size_t i = 0; i < vectors.size(); ++i) index.items[i].vector = std::move(vectors[i]);
  return index;
}

// Ranking used by retrieve_candidates: score descending, then idiom surface
// ascending by code point (UTF-8 byte order is code point order), then entry
// id.
inline bool candidate_rank_less(const AlignmentCandidate& a, const AlignmentCandidate& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.idiom != b.idiom) return a.idiom < b.idiom;
  return entry_id_less(a.entry_ref, b.entry_ref);
}

inline std::vector<AlignmentCandidate> retrieve_candidates(const MeaningIndex& index,
                                                           const EmbeddingVector& query,
                                                           const RetrievalConfig& config) {
  config.validate();
  if (query.dim() != index.dim)
    throw InputError("query dim " + std::to_string(query.dim()) + " does not match index dim " +
                     std::to_string(index.dim));
  std::vector<AlignmentCandidate> hits;
  for (const auto& item : index.items) {
    const double s = cosine_similarity(query, item.vector);
    if (s >= config.threshold) hits.push_back({item.entry_ref, item.idiom, item.meaning_en, s});
  }
  const std::size_t keep = std::min(config.k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(),
                    candidate_rank_less);
  hits.resize(keep);
  return hits;
}

// ---------------------------------------------------------------------------
// Persistence

inline constexpr std::string_view kIndexFormat = "idiomalign.meaning_index";
inline constexpr int kIndexVersion = 1;

inline nlohmann::json index_to_json(const MeaningIndex& index) {
  nlohmann::json j;
  j["format"] = kIndexFormat;
  j["version"] = kIndexVersion;
  j["target_language"] = index.target_language;
  j["provider_name"] = index.provider_name;
  j["dim"] = index.dim;
  j["excluded"] = index.excluded;
  auto items = nlohmann::json::array();
  for (const auto& it : index.items) {
    items.push_back({{"entry_ref", it.entry_ref},
                     {"idiom", it.idiom},
                     {"meaning_en", it.meaning_en},
                     {"key_text", it.key_text},
                     {"vector", std::vector<double>(it.vector.values().begin(),
                                                    it.vector.values().end())}});
  }
  j["items"] = std::move(items);
  return j;
}

// Rejects files from another format/version, and files built by a provider
// other than `expected_provider` when one is given.
inline MeaningIndex index_from_json(const nlohmann::json& j,
                                    std::string_view expected_provider = {}) {
  try {
    if (j.at("format").get<std::string>() != kIndexFormat)
      throw ConfigError("not a meaning index file");
    if (j.at("version").get<int>() != kIndexVersion)
      throw ConfigError("unsupported meaning index version " +
                        std::to_string(j.at("version").get<int>()));
    MeaningIndex index;
    index.target_language = j.at("target_language").get<std::string>();
    index.provider_name = j.at("provider_name").get<std::string>();
    index.dim = j.at("dim").get<std::size_t>();
    index.excluded = j.value("excluded", std::size_t{0});
    if (!expected_provider.empty() && index.provider_name != expected_provider)
      throw ConfigError("index was built with provider '" + index.provider_name +
                        "' but the active provider is '" + std::string(expected_provider) + "'");
    for (const auto& it : j.at("items")) {
      IndexItem item{it.at("entry_ref").get<std::string>(), it.at("idiom").get<std::string>(),
                     it.at("meaning_en").get<std::string>(), it.at("key_text").get<std::string>(),
                     EmbeddingVector(it.at("vector").get<std::vector<double>>())};
      if (item.vector.dim() != index.dim)
        throw ConfigError("index item '" + item.entry_ref + "' has wrong dimension");
      index.items.push_back(std::move(item));
    }
    return index;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("malformed meaning index: ") + ex.what());
  }
}

}  // namespace idiomalign

#endif  // IDIOMALIGN_RETRIEVAL_HPP_
