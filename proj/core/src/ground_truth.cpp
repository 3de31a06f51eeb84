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

#include "sonahunt/ground_truth.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "sonahunt/error.hpp"

namespace sonahunt {

namespace {

WordSet retrievable(const GroundTruth& gt, WordId word, std::optional<DefinitionId> excluded,
                    const Lexicon& lexicon, const IndexedPredicate& indexed) {
  const WordSet* relevant = gt.relevant(word);
  if (relevant == nullptr) {
    throw Error(ErrorCode::kUnknownWord, "word_id " + std::to_string(word.value));
  }
  WordSet out;
  for (const WordId candidate : *relevant) {
    const auto defs = lexicon.definitions_of(candidate);
    const bool reachable = std::any_of(defs.begin(), defs.end(), [&](DefinitionId d) {
      return d != excluded && (!indexed || indexed(d));
    });
    if (reachable) out.insert(candidate);
  }
  return out;
}

}  // namespace

GroundTruth GroundTruth::build(const Lexicon& lexicon) {
  GroundTruth gt;
  gt.relevant_.reserve(lexicon.words().size());
  for (const auto& w : lexicon.words()) {
    WordSet set{w.id};
    const auto syns = lexicon.synonyms_of(w.id);
    set.insert(syns.begin(), syns.end());
    gt.relevant_.emplace(w.id, std::move(set));
  }
  return gt;
}

const WordSet* GroundTruth::relevant(WordId word) const {
  const auto it = relevant_.find(word);
  return it == relevant_.end() ? nullptr : &it->second;
}

void GroundTruth::dump(std::ostream& out) const {
  std::vector<WordId> keys;
  keys.reserve(relevant_.size());
  for (const auto& [word, _] : relevant_) keys.push_back(word);
  std::sort(keys.begin(), keys.end());
  for (const WordId word : keys) {
    out << word.value << '\t';
    bool first = true;
    for (const WordId r : relevant_.at(word)) {
      out << (first ? "" : ",") << r.value;
      first = false;
    }
    out << '\n';
  }
}

WordSet retrievable_relevant_set(const GroundTruth& gt, WordId query_word,
                                 DefinitionId query_definition, const Lexicon& lexicon,
                                 const IndexedPredicate& indexed) {
  if (gt.relevant(query_word) == nullptr) {
    throw Error(ErrorCode::kUnknownWord, "word_id " + std::to_string(query_word.value));
  }
  const auto* def = lexicon.find_definition(query_definition);
  if (def == nullptr || def->word_id != query_word) {
    throw Error(ErrorCode::kDefinitionWordMismatch,
                "definition_id " + std::to_string(query_definition.value) +
                    " does not belong to word_id " + std::to_string(query_word.value));
  }
  return retrievable(gt, query_word, query_definition, lexicon, indexed);
}

WordSet indexed_relevant_set(const GroundTruth& gt, WordId word, const Lexicon& lexicon,
                             const IndexedPredicate& indexed) {
  return retrievable(gt, word, std::nullopt, lexicon, indexed);
}

}  // namespace sonahunt
