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

#include <functional>
#include <ostream>
#include <set>
#include <unordered_map>

#include "sonahunt/lexicon.hpp"
#include "sonahunt/types.hpp"

namespace sonahunt {

using WordSet = std::set<WordId>;

// Predicate telling whether a definition is present in the search index.
// An empty predicate means every lexicon definition is indexed.
using IndexedPredicate = std::function<bool(DefinitionId)>;

// Per-word relevance: a word and its synonyms all answer the same query.
class GroundTruth {
 public:
  // relevant(w) = {w} ∪ synonyms(w) for every word of the lexicon.
  static GroundTruth build(const Lexicon& lexicon);

  // Null for words that are not in the lexicon.
  const WordSet* relevant(WordId word) const;
  std::size_t size() const { return relevant_.size(); }

  // One line per word, ascending: "word_id<TAB>id,id,...".
  void dump(std::ostream& out) const;

 private:
  std::unordered_map<WordId, WordSet> relevant_;
};

// Relevant words of `query_word` that still have an indexed definition other
// than `query_definition`. This is the |Rel| used for average precision in the
// unlabeled protocol. Throws Error{kUnknownWord | kDefinitionWordMismatch}.
WordSet retrievable_relevant_set(const GroundTruth& gt, WordId query_word,
                                 DefinitionId query_definition, const Lexicon& lexicon,
                                 const IndexedPredicate& indexed = {});

// Same, without excluding any definition: relevant words of `word` with at
// least one indexed definition. Used for external (labeled) queries.
WordSet indexed_relevant_set(const GroundTruth& gt, WordId word, const Lexicon& lexicon,
                             const IndexedPredicate& indexed = {});

}  // namespace sonahunt
