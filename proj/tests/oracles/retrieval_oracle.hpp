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

// Brute-force reference for candidate retrieval, written without the library's
// ranking helpers: score every item, keep score >= threshold, full sort by
// (score desc, idiom code points asc, id), take the first k.

#ifndef IDIOMALIGN_TESTS_RETRIEVAL_ORACLE_HPP_
#define IDIOMALIGN_TESTS_RETRIEVAL_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "idiomalign/retrieval.hpp"

namespace idiomalign::oracle {

inline std::u32string code_points(const std::string& s) {
  std::u32string out;
  for (std::size_t i = 0; i < s.size();) {
    const auto b = static_cast<unsigned char>(s[i]);
    const int len = b < 0x80 ? 1 : b < 0xE0 ? 2 : b < 0xF0 ? 3 : 4;
    char32_t cp = len == 1 ? b : len == 2 ? (b & 0x1F) : len == 3 ? (b & 0x0F) : (b & 0x07);
    for (int k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    out.push_back(cp);
    i += static_cast<std::size_t>(len);
  }
  return out;
}

inline double cosine(const std::vector<double>& u, const std::vector<double>& v) {
  double dot = 0, uu = 0, vv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  const double c = dot / std::sqrt(uu * vv);
  return c > 1.0 ? 1.0 : c < -1.0 ? -1.0 : c;
}

// Ids in generated instances are decimal numbers, compared numerically.
inline std::vector<AlignmentCandidate> brute_force(const MeaningIndex& index,
                                                   const std::vector<double>& query, double tau,
                                                   std::size_t k) {
  std::vector<std::tuple<double, std::u32string, long long, AlignmentCandidate>> scored;
  for (const auto& item : index.items) {
    const std::vector<double> v(item.vector.values().begin(), item.vector.values().end());
    const double s = cosine(query, v);
    if (s >= tau)
      scored.emplace_back(-s, code_points(item.idiom), std::stoll(item.entry_ref),
                          AlignmentCandidate{item.entry_ref, item.idiom, item.meaning_en, s});
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a), std::get<2>(a)) <
           std::tie(std::get<0>(b), std::get<1>(b), std::get<2>(b));
  });
  std::vector<AlignmentCandidate> out;
  for (std::size_t i = 0; i < scored.size() && i < k; ++i) out.push_back(std::get<3>(scored[i]));
  return out;
}

struct Instance {
  MeaningIndex index;
  std::vector<double> query;
  double tau;
  std::size_t k;
};

// Small integer components make exact score ties common; idioms mix ASCII,
// Latin-1 and CJK so byte order and code-point order both matter.
inline Instance random_instance(std::mt19937_64& rng, std::size_t n) {
  static const std::vector<std::string> syllables{"a", "b", "é", "z", "中", "文", "ö", "Z", "😀"};
  static const double taus[] = {0.0, 0.7, 0.95};
  static const std::size_t ks[] = {1, 4, 10};
  const std::size_t dim = 3 + rng() % 6;
  auto vec = [&] {
    std::vector<double> v(dim);
    do {
      for (auto& x : v) x = static_cast<double>(static_cast<int>(rng() % 7) - 2);
    } while (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }));
    return v;
  };
  Instance inst;
  inst.index.target_language = "zh";
  inst.index.provider_name = "oracle";
  inst.index.dim = dim;
  std::vector<std::vector<double>> pool;
  for (std::size_t i = 0; i < n; ++i) {
    std::string idiom;
    const std::size_t len = 1 + rng() % 3;
    for (std::size_t j = 0; j < len; ++j) idiom += syllables[rng() % syllables.size()];
    // Reuse earlier vectors now and then for exact ties.
    std::vector<double> v = (!pool.empty() && rng() % 4 == 0) ? pool[rng() % pool.size()] : vec();
    pool.push_back(v);
    inst.index.items.push_back({std::to_string(rng() % (n * 2)), idiom, "m", "m", EmbeddingVector(v)});
  }
  inst.query = (!pool.empty() && rng() % 3 == 0) ? pool[rng() % pool.size()] : vec();
  inst.tau = taus[rng() % 3];
  inst.k = ks[rng() % 3];
  return inst;
}

}  // namespace idiomalign::oracle

#endif  // IDIOMALIGN_TESTS_RETRIEVAL_ORACLE_HPP_
