// Copyright 2026 The Sonahunt Authors.
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sonahunt/types.hpp"

namespace sonahunt {

// Dense float vector with finite components. Construction rejects NaN/Inf
// and empty input with Error{kInvalidArgument}.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<float> components);

  std::size_t dim() const { return components_.size(); }
  std::span<const float> values() const { return components_; }
  double norm() const;

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  std::vector<float> components_;
};

// Unit-length copy. Throws Error{kZeroVector} when the norm is zero.
EmbeddingVector normalize(const EmbeddingVector& v);

// Cosine similarity; both vectors must share a dimension.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

// Static token -> vector table, e.g. a word2vec export.
class WordVectorTable {
 public:
  explicit WordVectorTable(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vocabulary_.size(); }
  // Throws Error{kDimMismatch} when `v` has the wrong dimension.
  void insert(std::string token, EmbeddingVector v);
  const EmbeddingVector* find(std::string_view token) const;

 private:
  std::size_t dim_;
  std::unordered_map<std::string, EmbeddingVector> vocabulary_;
};

// Text format: header "<vocab_size> <dim>", then "token c1 ... cdim" per line.
WordVectorTable load_word_vectors(const std::filesystem::path& path);

// Whitespace-tokenized mean of the in-vocabulary token vectors, normalized.
// Throws Error{kAllTokensOutOfVocabulary} when no token is known.
EmbeddingVector embed_average(std::string_view text, const WordVectorTable& table);

// Deterministic pseudo-embedding of `text`, normalized. Stable across
// platforms: it uses its own hashing and Gaussian sampling.
EmbeddingVector hash_embedder(std::string_view text, std::size_t dim, std::uint64_t seed);

// Precomputed definition vectors produced offline by some model.
class EmbeddingSet {
 public:
  using Entry = std::pair<DefinitionId, EmbeddingVector>;

  EmbeddingSet(std::size_t dim, std::string model_name)
      : dim_(dim), model_name_(std::move(model_name)) {}

  std::size_t dim() const { return dim_; }
  const std::string& model_name() const { return model_name_; }
  std::size_t size() const { return entries_.size(); }
  // Insertion order; this is also the on-disk order.
  std::span<const Entry> entries() const { return entries_; }

  // Throws Error{kDimMismatch} or Error{kDuplicateDefinitionId}.
  void add(DefinitionId id, EmbeddingVector v);
  const EmbeddingVector* find(DefinitionId id) const;

  friend bool operator==(const EmbeddingSet& a, const EmbeddingSet& b) {
    return a.dim_ == b.dim_ && a.entries_ == b.entries_;
  }

 private:
  std::size_t dim_;
  std::string model_name_;
  std::vector<Entry> entries_;
  std::unordered_map<DefinitionId, std::size_t> by_id_;
};

// Binary little-endian layout:
//   "EMB1" | dim: u32 | count: u64 | count x (definition_id: u64, dim x f32)
// The model name is not stored; loading labels the set with the file stem.
void write_embedding_set(const EmbeddingSet& set, const std::filesystem::path& path);

// Throws Error{kBadMagic | kTruncatedFile | kDimMismatch | kIoFailure}.
// kDimMismatch covers a zero dimension and trailing bytes that do not fit the
// header's record size.
EmbeddingSet load_embedding_set(const std::filesystem::path& path);

}  // namespace sonahunt
