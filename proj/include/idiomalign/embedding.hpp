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

#ifndef IDIOMALIGN_EMBEDDING_HPP_
#define IDIOMALIGN_EMBEDDING_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "idiomalign/error.hpp"
#include "idiomalign/text.hpp"

namespace idiomalign {

// Dense real vector produced by one embedding provider.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  bool is_zero() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double x) { return x == 0.0; });
  }

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  std::vector<double> values_;
};

// Turns text into vectors of a fixed dimension. Implementations must return
// the same vector for the same text for the lifetime of the instance and must
// tolerate concurrent embed() calls.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;
  virtual EmbeddingVector embed(std::string_view text) const = 0;

  virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed(t));
    return out;
  }
};

namespace detail {

inline void check_provider_output(const EmbeddingProvider& provider, std::string_view text,
                                  const EmbeddingVector& v) {
  if (v.dim() != provider.dim())
    throw ConfigError("provider '" + provider.name() + "' returned dim " +
                      std::to_string(v.dim()) + ", expected " + std::to_string(provider.dim()) +
                      " for text '" + std::string(text) + "'");
  if (v.is_zero())
    throw ConfigError("provider '" + provider.name() + "' returned a zero vector for text '" +
                      std::string(text) + "'");
}

}  // namespace detail

// Checked entry point: rejects blank text and validates the provider's output.
inline EmbeddingVector embed_text(const EmbeddingProvider& provider, std::string_view text) {
  if (text::is_blank(text)) throw InputError("cannot embed empty text");
  EmbeddingVector v = provider.embed(text);
  detail::check_provider_output(provider, text, v);
  return v;
}

inline std::vector<EmbeddingVector> embed_texts(const EmbeddingProvider& provider,
                                                std::span<const std::string> texts) {
  for (const auto& t : texts)
    if (text::is_blank(t)) throw InputError("cannot embed empty text");
  auto out = provider.embed_batch(texts);
  if (out.size() != texts.size())
    throw ConfigError("provider '" + provider.name() + "' returned " +
                      std::to_string(out.size()) + " vectors for " +
                      std::to_string(texts.size()) + " texts");
  for (std::size_t i = 0; i < out.size(); ++i)
    detail::check_provider_output(provider, texts[i], out[i]);
  return out;
}

// dot(u,v) / (|u||v|), clamped to [-1, 1]. Both vectors must be non-zero and
// of equal dimension.
inline double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw InputError("dimension mismatch: " + std::to_string(u.size()) + " vs " +
                     std::to_string(v.size()));
  double dot = 0.0;
  double uu = 0.0;
  double vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw InputError("cosine similarity of a zero vector");
  // sqrt(uu * vv) keeps cos(u, u) exactly 1; the split form guards overflow.
  const double prod = uu * vv;
  const double denom =
      (std::isfinite(prod) && prod > 0.0) ? std::sqrt(prod) : std::sqrt(uu) * std::sqrt(vv);
  return std::clamp(dot / denom, -1.0, 1.0);
}

inline double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v) {
  return cosine_similarity(u.values(), v.values());
}

// ---------------------------------------------------------------------------
// Deterministic offline embedder
//
// The ASCII-lowercased text is padded with one space on each side and split
// into code-point trigrams. Each trigram's UTF-8 bytes are hashed with 64-bit
// FNV-1a whose offset basis is XORed with kTestEmbedSeed; the hash modulo dim
// picks a bucket. The bucket counts are L2-normalized. Everything is integer
// arithmetic until the final division, so the output is identical on every
// IEEE-754 platform.

inline constexpr std::uint64_t kTestEmbedSeed = 0x9e3779b97f4a7c15ULL;
inline constexpr std::size_t kTestEmbedMinDim = 8;

inline std::vector<std::string> char_trigrams(std::string_view text) {
  auto chars = text::utf8_chars(text::to_lower_ascii(text));
  chars.insert(chars.begin(), " ");
  chars.emplace_back(" ");
  std::vector<std::string> grams;
  for (std::size_t i = 0; i + 3 <= chars.size(); ++i)
    grams.push_back(chars[i] + chars[i + 1] + chars[i + 2]);
  return grams;
}

inline std::size_t trigram_bucket(std::string_view gram, std::size_t dim) {
  return static_cast<std::size_t>(text::fnv1a64(gram, text::kFnvOffsetBasis ^ kTestEmbedSeed) %
                                  dim);
}

inline EmbeddingVector test_embed(std::string_view text, std::size_t dim) {
  if (dim < kTestEmbedMinDim)
    throw InputError("test embedder needs dim >= " + std::to_string(kTestEmbedMinDim));
  if (text::is_blank(text)) throw InputError("cannot embed empty text");
  std::vector<std::uint64_t> counts(dim, 0);
  for (const auto& g : char_trigrams(text)) ++counts[trigram_bucket(g, dim)];
  std::uint64_t sq = 0;
  for (auto c : counts) sq += c * c;
  const double norm = std::sqrt(static_cast<double>(sq));
  std::vector<double> values(dim);
  for (std::size_t i = 0; i < dim; ++i) values[i] = static_cast<double>(counts[i]) / norm;
  return EmbeddingVector(std::move(values));
}

class TestEmbedder final : public EmbeddingProvider {
 public:
  explicit TestEmbedder(std::size_t dim = 64) : dim_(dim) {
    if (dim < kTestEmbedMinDim)
      throw InputError("test embedder needs dim >= " + std::to_string(kTestEmbedMinDim));
  }

  std::string name() const override { return "test-trigram-v1/dim=" + std::to_string(dim_); }
  std::size_t dim() const override { return dim_; }
  EmbeddingVector embed(std::string_view text) const override { return test_embed(text, dim_); }

 private:
  std::size_t dim_;
};

}  // namespace idiomalign

#endif  // IDIOMALIGN_EMBEDDING_HPP_
