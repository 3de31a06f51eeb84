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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "sonahunt/embedding.hpp"
#include "sonahunt/ground_truth.hpp"
#include "sonahunt/hnsw_index.hpp"
#include "sonahunt/lexicon.hpp"
#include "sonahunt/metrics.hpp"

namespace sonahunt {

// Source of definition hits for the evaluation protocols.
class Retriever {
 public:
  virtual ~Retriever() = default;
  virtual std::vector<SearchHit> retrieve(std::span<const float> query, std::size_t k) const = 0;
  virtual bool contains(DefinitionId id) const = 0;
};

class HnswRetriever final : public Retriever {
 public:
  // `ef` defaults to the index's ef_search.
  explicit HnswRetriever(const HnswIndex& index, std::optional<std::size_t> ef = std::nullopt);
  std::vector<SearchHit> retrieve(std::span<const float> query, std::size_t k) const override;
  bool contains(DefinitionId id) const override { return ids_.contains(id); }

 private:
  const HnswIndex& index_;
  std::size_t ef_;
  std::unordered_set<DefinitionId> ids_;
};

class ExactRetriever final : public Retriever {
 public:
  explicit ExactRetriever(std::span<const IndexedPoint> points);
  std::vector<SearchHit> retrieve(std::span<const float> query, std::size_t k) const override;
  bool contains(DefinitionId id) const override { return ids_.contains(id); }

 private:
  std::span<const IndexedPoint> points_;
  std::unordered_set<DefinitionId> ids_;
};

// One word of a deduplicated ranking, with the hit that ranked it.
struct WordHit {
  WordId word_id;
  SearchHit best;
};

// Keeps the first hit of each word, in order, up to `limit` words.
std::vector<WordHit> dedup_hits_to_words(std::span<const SearchHit> hits, std::size_t limit);
RankedResult dedup_to_words(std::span<const SearchHit> hits, std::size_t limit,
                            std::uint64_t query_id = 0);

enum class QueryLanguages { kAll, kNonEstonian };

struct UnlabeledEvalConfig {
  std::size_t candidates = kResultLimit;  // words kept per query
  std::size_t fetch_multiplier = 5;       // definition hits fetched per kept word
  QueryLanguages query_languages = QueryLanguages::kAll;
  std::size_t threads = 1;
};

// Every eligible definition queries the index with its own vector; its own
// hit is dropped, the rest is ranked per word and judged against the query
// word and its synonyms. Throws Error{kMissingEmbedding | kEmptyJudgments}.
EvalReport run_unlabeled_eval(const Retriever& retriever, const Lexicon& lexicon,
                              const GroundTruth& gt, const EmbeddingSet& embeddings,
                              const UnlabeledEvalConfig& cfg = {});

struct LabeledItem {
  std::string query_text;
  LanguageCode query_language;
  WordId target_word;
  DefinitionId target_definition;
};

struct LabeledDataset {
  std::vector<LabeledItem> items;

  // Language -> item positions, in file order.
  std::map<LanguageCode, std::vector<std::size_t>> by_language() const;
};

// "target_word_id<TAB>target_definition_id<TAB>query_language<TAB>query_text"
LabeledDataset load_labeled_dataset(const std::filesystem::path& path);

using QueryEmbedder = std::function<EmbeddingVector(std::string_view)>;

// Per query language: external queries, no self-exclusion; relevant words are
// the target and its synonyms. Items whose embedding fails are skipped and
// counted. Throws Error{kMissingTarget}.
std::map<LanguageCode, EvalReport> run_labeled_eval(const Retriever& retriever,
                                                    const Lexicon& lexicon, const GroundTruth& gt,
                                                    const LabeledDataset& dataset,
                                                    const QueryEmbedder& embed,
                                                    const UnlabeledEvalConfig& cfg = {});

}  // namespace sonahunt
