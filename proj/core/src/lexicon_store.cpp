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

#include "sonahunt/lexicon_store.hpp"

#include <sqlite3.h>

#include <bit>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sonahunt/error.hpp"

namespace sonahunt {

namespace {

struct DbCloser {
  void operator()(sqlite3* db) const { sqlite3_close(db); }
};
struct StmtFinalizer {
  void operator()(sqlite3_stmt* stmt) const { sqlite3_finalize(stmt); }
};
using DbPtr = std::unique_ptr<sqlite3, DbCloser>;
using StmtPtr = std::unique_ptr<sqlite3_stmt, StmtFinalizer>;

std::int64_t to_sql(std::uint64_t v) { return std::bit_cast<std::int64_t>(v); }
std::uint64_t from_sql(std::int64_t v) { return std::bit_cast<std::uint64_t>(v); }

[[noreturn]] void fail(sqlite3* db, const std::string& what) {
  throw Error(ErrorCode::kIoFailure, what + ": " + (db ? sqlite3_errmsg(db) : "sqlite error"));
}

DbPtr open(const std::filesystem::path& file, int flags) {
  sqlite3* raw = nullptr;
  const int rc = sqlite3_open_v2(file.c_str(), &raw, flags, nullptr);
  DbPtr db(raw);
  if (rc != SQLITE_OK) fail(raw, "cannot open " + file.string());
  return db;
}

void exec(sqlite3* db, const char* sql) {
  char* msg = nullptr;
  if (sqlite3_exec(db, sql, nullptr, nullptr, &msg) != SQLITE_OK) {
    std::string text = msg ? msg : "unknown";
    sqlite3_free(msg);
    throw Error(ErrorCode::kIoFailure, std::string("sqlite: ") + text);
  }
}

StmtPtr prepare(sqlite3* db, const char* sql) {
  sqlite3_stmt* raw = nullptr;
  if (sqlite3_prepare_v2(db, sql, -1, &raw, nullptr) != SQLITE_OK) fail(db, "prepare");
  return StmtPtr(raw);
}

void bind_text(sqlite3_stmt* stmt, int col, const std::string& s) {
  sqlite3_bind_text(stmt, col, s.data(), static_cast<int>(s.size()), SQLITE_TRANSIENT);
}

void step_done(sqlite3* db, sqlite3_stmt* stmt) {
  if (sqlite3_step(stmt) != SQLITE_DONE) fail(db, "insert");
  sqlite3_reset(stmt);
}

std::string column_text(sqlite3_stmt* stmt, int col) {
  const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt, col));
  return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt, col))) : std::string();
}

}  // namespace

void save_lexicon_store(const Lexicon& lexicon, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + dir.string() + ": " + ec.message());
  const auto file = dir / kLexiconStoreFile;
  std::filesystem::remove(file, ec);

  auto db = open(file, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE);
  exec(db.get(),
       "PRAGMA journal_mode=OFF;"
       "CREATE TABLE words(word_id INTEGER PRIMARY KEY, language TEXT NOT NULL, surface TEXT NOT NULL);"
       "CREATE TABLE definitions(definition_id INTEGER PRIMARY KEY, word_id INTEGER NOT NULL,"
       " language TEXT NOT NULL, text TEXT NOT NULL);"
       "CREATE INDEX definitions_by_word ON definitions(word_id);"
       "CREATE TABLE synonyms(source_word_id INTEGER NOT NULL, target_word_id INTEGER NOT NULL,"
       " PRIMARY KEY(source_word_id, target_word_id));"
       "CREATE TABLE meta(key TEXT PRIMARY KEY, value INTEGER NOT NULL);"
       "BEGIN;");

  {
    auto stmt = prepare(db.get(), "INSERT INTO words VALUES(?, ?, ?)");
    for (const auto& w : lexicon.words()) {
      sqlite3_bind_int64(stmt.get(), 1, to_sql(w.id.value));
      bind_text(stmt.get(), 2, w.language);
      bind_text(stmt.get(), 3, w.surface);
      step_done(db.get(), stmt.get());
    }
  }
  {
    auto stmt = prepare(db.get(), "INSERT INTO definitions VALUES(?, ?, ?, ?)");
    for (const auto& d : lexicon.definitions()) {
      sqlite3_bind_int64(stmt.get(), 1, to_sql(d.id.value));
      sqlite3_bind_int64(stmt.get(), 2, to_sql(d.word_id.value));
      bind_text(stmt.get(), 3, d.language);
      bind_text(stmt.get(), 4, d.text);
      step_done(db.get(), stmt.get());
    }
  }
  {
    auto stmt = prepare(db.get(), "INSERT INTO synonyms VALUES(?, ?)");
    for (const auto& s : lexicon.synonyms()) {
      sqlite3_bind_int64(stmt.get(), 1, to_sql(s.source.value));
      sqlite3_bind_int64(stmt.get(), 2, to_sql(s.target.value));
      step_done(db.get(), stmt.get());
    }
  }
  {
    auto stmt = prepare(db.get(), "INSERT INTO meta VALUES(?, ?)");
    const auto& warn = lexicon.warnings();
    const std::pair<const char*, std::size_t> rows[] = {
        {"raw_synonym_count", lexicon.raw_synonym_count()},
        {"dropped_self_synonyms", warn.self_synonyms},
        {"dropped_non_word_relations", warn.non_word_relations},
        {"duplicate_synonyms", warn.duplicate_synonyms},
    };
    for (const auto& [key, value] : rows) {
      bind_text(stmt.get(), 1, key);
      sqlite3_bind_int64(stmt.get(), 2, static_cast<std::int64_t>(value));
      step_done(db.get(), stmt.get());
    }
  }
  exec(db.get(), "COMMIT;");
}

Lexicon load_lexicon_store(const std::filesystem::path& dir) {
  const auto file = dir / kLexiconStoreFile;
  if (!std::filesystem::exists(file)) {
    throw Error(ErrorCode::kIoFailure, "no lexicon store at " + file.string());
  }
  auto db = open(file, SQLITE_OPEN_READONLY);

  std::vector<WordEntry> words;
  {
    auto stmt = prepare(db.get(), "SELECT word_id, language, surface FROM words");
    while (sqlite3_step(stmt.get()) == SQLITE_ROW) {
      words.push_back({WordId{from_sql(sqlite3_column_int64(stmt.get(), 0))},
                       column_text(stmt.get(), 1), column_text(stmt.get(), 2)});
    }
  }
  std::vector<DefinitionEntry> definitions;
  {
    auto stmt = prepare(db.get(), "SELECT definition_id, word_id, language, text FROM definitions");
    while (sqlite3_step(stmt.get()) == SQLITE_ROW) {
      definitions.push_back({DefinitionId{from_sql(sqlite3_column_int64(stmt.get(), 0))},
                             WordId{from_sql(sqlite3_column_int64(stmt.get(), 1))},
                             column_text(stmt.get(), 2), column_text(stmt.get(), 3)});
    }
  }
  std::vector<SynonymRelation> synonyms;
  {
    auto stmt = prepare(db.get(), "SELECT source_word_id, target_word_id FROM synonyms");
    while (sqlite3_step(stmt.get()) == SQLITE_ROW) {
      synonyms.push_back({WordId{from_sql(sqlite3_column_int64(stmt.get(), 0))},
                          WordId{from_sql(sqlite3_column_int64(stmt.get(), 1))}});
    }
  }
  std::size_t raw_count = 0;
  LoadWarnings warnings;
  {
    auto stmt = prepare(db.get(), "SELECT key, value FROM meta");
    while (sqlite3_step(stmt.get()) == SQLITE_ROW) {
      const auto key = column_text(stmt.get(), 0);
      const auto value = static_cast<std::size_t>(sqlite3_column_int64(stmt.get(), 1));
      if (key == "raw_synonym_count") raw_count = value;
      else if (key == "dropped_self_synonyms") warnings.self_synonyms = value;
      else if (key == "dropped_non_word_relations") warnings.non_word_relations = value;
      else if (key == "duplicate_synonyms") warnings.duplicate_synonyms = value;
    }
  }
  return Lexicon::from_mirrored(std::move(words), std::move(definitions), std::move(synonyms),
                                raw_count, warnings);
}

}  // namespace sonahunt
