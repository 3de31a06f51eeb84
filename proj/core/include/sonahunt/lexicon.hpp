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
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sonahunt/types.hpp"

namespace sonahunt {

struct WordEntry {
  WordId id;
  LanguageCode language;
  std::string surface;

  friend bool operator==(const WordEntry&, const WordEntry&) = default;
};

struct DefinitionEntry {
  DefinitionId id;
  WordId word_id;
  LanguageCode language;
  std::string text;

  friend bool operator==(const DefinitionEntry&, const DefinitionEntry&) = default;
};

struct SynonymRelation {
  WordId source;
  WordId target;

  friend auto operator<=>(const SynonymRelation&, const SynonymRelation&) = default;
};

// Records dropped while reading the synonym file. None of them is fatal.
struct LoadWarnings {
  std::size_t self_synonyms = 0;
  std::size_t non_word_relations = 0;
  std::size_t duplicate_synonyms = 0;

  friend bool operator==(const LoadWarnings&, const LoadWarnings&) = default;
};

// Symmetric closure of `relations`, deduplicated and sorted. Self-loops must
// already be removed.
std::vector<SynonymRelation> mirror_synonyms(std::span<const SynonymRelation> relations);

// Words, definitions and word-to-word synonymy. A Lexicon is always finalized:
// references resolve, every word has a definition, and synonymy is symmetric.
// Immutable after construction.
class Lexicon {
 public:
  Lexicon() = default;

  // Validates and finalizes. `raw_synonyms` may contain duplicates and a
  // single direction only; self-loops are dropped and counted in `warnings`.
  // Throws Error{kMalformedRecord | kDanglingReference | kMissingDefinition}.
  static Lexicon build(std::vector<WordEntry> words, std::vector<DefinitionEntry> definitions,
                       std::vector<SynonymRelation> raw_synonyms, LoadWarnings warnings = {});

  // Reassembles a lexicon whose synonymy was already mirrored (the persisted
  // form). `raw_synonym_count` is carried through for stats.
  static Lexicon from_mirrored(std::vector<WordEntry> words, std::vector<DefinitionEntry> definitions,
                               std::vector<SynonymRelation> mirrored, std::size_t raw_synonym_count,
                               LoadWarnings warnings);

  std::span<const WordEntry> words() const { return words_; }
  std::span<const DefinitionEntry> definitions() const { return definitions_; }
  // Mirrored relations, sorted by (source, target).
  std::span<const SynonymRelation> synonyms() const { return synonyms_; }
  // Distinct directed relations present in the input, before mirroring.
  std::size_t raw_synonym_count() const { return raw_synonym_count_; }
  const LoadWarnings& warnings() const { return warnings_; }

  const WordEntry* find_word(WordId id) const;
  const DefinitionEntry* find_definition(DefinitionId id) const;
  // Both return an empty span for unknown ids.
  std::span<const DefinitionId> definitions_of(WordId id) const;
  std::span<const WordId> synonyms_of(WordId id) const;

  friend bool operator==(const Lexicon& a, const Lexicon& b);

 private:
  void index();

  std::vector<WordEntry> words_;
  std::vector<DefinitionEntry> definitions_;
  std::vector<SynonymRelation> synonyms_;
  std::size_t raw_synonym_count_ = 0;
  LoadWarnings warnings_;

  std::unordered_map<WordId, std::size_t> word_pos_;
  std::unordered_map<DefinitionId, std::size_t> definition_pos_;
  std::vector<std::vector<DefinitionId>> word_definitions_;
  std::vector<std::vector<WordId>> word_synonyms_;
};

// Reads the three tab-separated input files. Blank lines and lines starting
// with '#' are skipped. The synonym file may carry an optional third column
// with the relation type; anything other than word-to-word is dropped.
Lexicon load_lexicon(const std::filesystem::path& words_path,
                     const std::filesystem::path& definitions_path,
                     const std::filesystem::path& synonyms_path);

struct LexiconStats {
  std::size_t word_count = 0;
  std::map<LanguageCode, std::size_t> definition_count_by_language;
  std::size_t raw_synonym_count = 0;
  std::size_t mirrored_synonym_count = 0;
  // Words that take part in at least one relation; denominator of the average.
  std::size_t words_with_synonyms = 0;
  double avg_synonyms_per_word = 0.0;

  friend bool operator==(const LexiconStats&, const LexiconStats&) = default;
};

LexiconStats lexicon_stats(const Lexicon& lexicon);

// Definitions usable as evaluation queries: those whose word has at least two
// definitions or at least one synonym. Sorted ascending.
std::vector<DefinitionId> filter_eligible_queries(const Lexicon& lexicon);

}  // namespace sonahunt
