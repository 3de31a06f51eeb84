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

#include "sonahunt/lexicon.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>
#include <utility>

#include "sonahunt/error.hpp"
#include "text_util.hpp"

namespace sonahunt {

namespace {

std::string describe(WordId id) { return "word_id " + std::to_string(id.value); }

bool is_word_relation(std::string_view type) {
  return type == "word" || type == "word-word" || type == "w2w";
}

}  // namespace

std::vector<SynonymRelation> mirror_synonyms(std::span<const SynonymRelation> relations) {
  std::vector<SynonymRelation> out;
  out.reserve(relations.size() * 2);
  for (const auto& r : relations) {
    out.push_back(r);
    out.push_back({r.target, r.source});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Lexicon Lexicon::build(std::vector<WordEntry> words, std::vector<DefinitionEntry> definitions,
                       std::vector<SynonymRelation> raw_synonyms, LoadWarnings warnings) {
  std::erase_if(raw_synonyms, [&](const SynonymRelation& r) {
    if (r.source != r.target) return false;
    ++warnings.self_synonyms;
    return true;
  });
  std::sort(raw_synonyms.begin(), raw_synonyms.end());
  const auto unique_end = std::unique(raw_synonyms.begin(), raw_synonyms.end());
  warnings.duplicate_synonyms += static_cast<std::size_t>(raw_synonyms.end() - unique_end);
  raw_synonyms.erase(unique_end, raw_synonyms.end());

  const std::size_t raw_count = raw_synonyms.size();
  auto mirrored = mirror_synonyms(raw_synonyms);
  return from_mirrored(std::move(words), std::move(definitions), std::move(mirrored), raw_count,
                       warnings);
}

Lexicon Lexicon::from_mirrored(std::vector<WordEntry> words,
                               std::vector<DefinitionEntry> definitions,
                               std::vector<SynonymRelation> mirrored,
                               std::size_t raw_synonym_count, LoadWarnings warnings) {
  Lexicon lex;
  lex.words_ = std::move(words);
  lex.definitions_ = std::move(definitions);
  lex.synonyms_ = std::move(mirrored);
  lex.raw_synonym_count_ = raw_synonym_count;
  lex.warnings_ = warnings;

  std::sort(lex.words_.begin(), lex.words_.end(),
            [](const WordEntry& a, const WordEntry& b) { return a.id < b.id; });
  std::sort(lex.definitions_.begin(), lex.definitions_.end(),
            [](const DefinitionEntry& a, const DefinitionEntry& b) { return a.id < b.id; });
  std::sort(lex.synonyms_.begin(), lex.synonyms_.end());
  lex.synonyms_.erase(std::unique(lex.synonyms_.begin(), lex.synonyms_.end()),
                      lex.synonyms_.end());

  for (std::size_t i = 1; i < lex.words_.size(); ++i) {
    if (lex.words_[i].id == lex.words_[i - 1].id) {
      throw Error(ErrorCode::kMalformedRecord, "duplicate " + describe(lex.words_[i].id));
    }
  }
  for (std::size_t i = 1; i < lex.definitions_.size(); ++i) {
    if (lex.definitions_[i].id == lex.definitions_[i - 1].id) {
      throw Error(ErrorCode::kMalformedRecord,
                  "duplicate definition_id " + std::to_string(lex.definitions_[i].id.value));
    }
  }
  for (const auto& w : lex.words_) {
    if (detail::trim(w.surface).empty()) {
      throw Error(ErrorCode::kMalformedRecord, "empty surface for " + describe(w.id));
    }
  }
  for (const auto& s : lex.synonyms_) {
    if (s.source == s.target) {
      throw Error(ErrorCode::kMalformedRecord, "self synonym on " + describe(s.source));
    }
  }
  if (mirror_synonyms(lex.synonyms_) != lex.synonyms_) {
    throw Error(ErrorCode::kMalformedRecord, "synonym relation is not symmetric");
  }

  lex.index();
  return lex;
}

void Lexicon::index() {
  word_pos_.clear();
  definition_pos_.clear();
  word_pos_.reserve(words_.size());
  definition_pos_.reserve(definitions_.size());
  word_definitions_.assign(words_.size(), {});
  word_synonyms_.assign(words_.size(), {});

  for (std::size_t i = 0; i < words_.size(); ++i) word_pos_.emplace(words_[i].id, i);
  for (std::size_t i = 0; i < definitions_.size(); ++i) {
    const auto& d = definitions_[i];
    const auto it = word_pos_.find(d.word_id);
    if (it == word_pos_.end()) {
      throw Error(ErrorCode::kDanglingReference, "definition_id " + std::to_string(d.id.value) +
                                                     " references unknown " + describe(d.word_id));
    }
    definition_pos_.emplace(d.id, i);
    word_definitions_[it->second].push_back(d.id);
  }
  for (const auto& s : synonyms_) {
    const auto src = word_pos_.find(s.source);
    if (src == word_pos_.end()) {
      throw Error(ErrorCode::kDanglingReference, "synonym references unknown " + describe(s.source));
    }
    if (!word_pos_.contains(s.target)) {
      throw Error(ErrorCode::kDanglingReference, "synonym references unknown " + describe(s.target));
    }
    word_synonyms_[src->second].push_back(s.target);
  }
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (word_definitions_[i].empty()) {
      throw Error(ErrorCode::kMissingDefinition, describe(words_[i].id) + " has no definition");
    }
  }
}

const WordEntry* Lexicon::find_word(WordId id) const {
  const auto it = word_pos_.find(id);
  return it == word_pos_.end() ? nullptr : &words_[it->second];
}

const DefinitionEntry* Lexicon::find_definition(DefinitionId id) const {
  const auto it = definition_pos_.find(id);
  return it == definition_pos_.end() ? nullptr : &definitions_[it->second];
}

std::span<const DefinitionId> Lexicon::definitions_of(WordId id) const {
  const auto it = word_pos_.find(id);
  if (it == word_pos_.end()) return {};
  return word_definitions_[it->second];
}

std::span<const WordId> Lexicon::synonyms_of(WordId id) const {
  const auto it = word_pos_.find(id);
  if (it == word_pos_.end()) return {};
  return word_synonyms_[it->second];
}

bool operator==(const Lexicon& a, const Lexicon& b) {
  return a.words_ == b.words_ && a.definitions_ == b.definitions_ && a.synonyms_ == b.synonyms_ &&
         a.raw_synonym_count_ == b.raw_synonym_count_ && a.warnings_ == b.warnings_;
}

Lexicon load_lexicon(const std::filesystem::path& words_path,
                     const std::filesystem::path& definitions_path,
                     const std::filesystem::path& synonyms_path) {
  std::string line;

  std::vector<WordEntry> words;
  std::unordered_set<WordId> word_ids;
  {
    detail::RecordReader reader(words_path);
    while (reader.next(line)) {
      const auto fields = detail::split(line, '\t');
      if (fields.size() != 3) reader.fail("record", "expected 3 tab-separated fields");
      const auto id = detail::parse_u64(fields[0]);
      if (!id) reader.fail("word_id", "not an unsigned 64-bit integer");
      const auto language = detail::trim(fields[1]);
      if (language.empty()) reader.fail("language", "empty");
      const auto surface = detail::trim(fields[2]);
      if (surface.empty()) reader.fail("surface", "empty after trimming");
      if (!word_ids.insert(WordId{*id}).second) reader.fail("word_id", "duplicate id");
      words.push_back({WordId{*id}, std::string(language), std::string(surface)});
    }
  }

  std::vector<DefinitionEntry> definitions;
  std::unordered_set<DefinitionId> definition_ids;
  {
    detail::RecordReader reader(definitions_path);
    while (reader.next(line)) {
      const auto fields = detail::split(line, '\t');
      if (fields.size() != 4) reader.fail("record", "expected 4 tab-separated fields");
      const auto id = detail::parse_u64(fields[0]);
      if (!id) reader.fail("definition_id", "not an unsigned 64-bit integer");
      const auto word = detail::parse_u64(fields[1]);
      if (!word) reader.fail("word_id", "not an unsigned 64-bit integer");
      const auto language = detail::trim(fields[2]);
      if (language.empty()) reader.fail("language", "empty");
      if (detail::trim(fields[3]).empty()) reader.fail("text", "empty");
      if (!word_ids.contains(WordId{*word})) {
        throw Error(ErrorCode::kDanglingReference,
                    definitions_path.string() + ":" + std::to_string(reader.line_no()) +
                        ": definition references unknown word_id " + std::to_string(*word));
      }
      if (!definition_ids.insert(DefinitionId{*id}).second) {
        reader.fail("definition_id", "duplicate id");
      }
      definitions.push_back(
          {DefinitionId{*id}, WordId{*word}, std::string(language), std::string(fields[3])});
    }
  }

  std::vector<SynonymRelation> relations;
  LoadWarnings warnings;
  {
    detail::RecordReader reader(synonyms_path);
    while (reader.next(line)) {
      const auto fields = detail::split(line, '\t');
      if (fields.size() != 2 && fields.size() != 3) {
        reader.fail("record", "expected 2 or 3 tab-separated fields");
      }
      const auto source = detail::parse_u64(fields[0]);
      if (!source) reader.fail("source_word_id", "not an unsigned 64-bit integer");
      const auto target = detail::parse_u64(fields[1]);
      if (!target) reader.fail("target_word_id", "not an unsigned 64-bit integer");
      if (fields.size() == 3 && !is_word_relation(detail::trim(fields[2]))) {
        ++warnings.non_word_relations;
        continue;
      }
      for (const auto id : {*source, *target}) {
        if (!word_ids.contains(WordId{id})) {
          throw Error(ErrorCode::kDanglingReference,
                      synonyms_path.string() + ":" + std::to_string(reader.line_no()) +
                          ": synonym references unknown word_id " + std::to_string(id));
        }
      }
      relations.push_back({WordId{*source}, WordId{*target}});
    }
  }

  return Lexicon::build(std::move(words), std::move(definitions), std::move(relations), warnings);
}

LexiconStats lexicon_stats(const Lexicon& lexicon) {
  LexiconStats stats;
  stats.word_count = lexicon.words().size();
  for (const auto& d : lexicon.definitions()) ++stats.definition_count_by_language[d.language];
  stats.raw_synonym_count = lexicon.raw_synonym_count();
  stats.mirrored_synonym_count = lexicon.synonyms().size();
  for (const auto& w : lexicon.words()) {
    if (!lexicon.synonyms_of(w.id).empty()) ++stats.words_with_synonyms;
  }
  if (stats.words_with_synonyms > 0) {
    stats.avg_synonyms_per_word = static_cast<double>(stats.mirrored_synonym_count) /
                                  static_cast<double>(stats.words_with_synonyms);
  }
  return stats;
}

std::vector<DefinitionId> filter_eligible_queries(const Lexicon& lexicon) {
  std::vector<DefinitionId> out;
  for (const auto& d : lexicon.definitions()) {
    if (lexicon.definitions_of(d.word_id).size() >= 2 || !lexicon.synonyms_of(d.word_id).empty()) {
      out.push_back(d.id);
    }
  }
  return out;  // definitions() is sorted by id
}

}  // namespace sonahunt
