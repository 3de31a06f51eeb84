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

#include <filesystem>

#include "sonahunt/lexicon.hpp"

namespace sonahunt {

// Single-file SQLite store for a finalized lexicon, `<dir>/lexicon.db`.
//
//   words(word_id INTEGER PRIMARY KEY, language TEXT, surface TEXT)
//   definitions(definition_id INTEGER PRIMARY KEY, word_id INTEGER, language TEXT, text TEXT)
//   synonyms(source_word_id INTEGER, target_word_id INTEGER)   -- mirrored
//   meta(key TEXT PRIMARY KEY, value INTEGER)
//
// Ids are stored as the two's-complement reinterpretation of the unsigned
// value, so the full 64-bit range survives.
inline constexpr const char* kLexiconStoreFile = "lexicon.db";

// Replaces any existing store in `dir` (created if missing).
void save_lexicon_store(const Lexicon& lexicon, const std::filesystem::path& dir);

// Throws Error{kIoFailure} when the store is missing or unreadable.
Lexicon load_lexicon_store(const std::filesystem::path& dir);

}  // namespace sonahunt
