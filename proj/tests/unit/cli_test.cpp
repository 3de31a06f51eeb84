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

#include <gtest/gtest.h>

#include <httplib.h>
#include <json.hpp>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <regex>
#include <sstream>

#include "cli.hpp"
#include "fixtures.hpp"
#include "sonahunt/embedding.hpp"
#include "sonahunt/lexicon_store.hpp"

extern char** environ;

namespace sonahunt {
namespace {

using testing::TempDir;
using testing::write_text;

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

struct CliPipeline : ::testing::Test {
  TempDir dir;
  std::string lex, emb, index;

  void SetUp() override {
    const auto files = testing::write_pair_fixture(dir.path(), 30, true);
    lex = (dir / "lex").string();
    emb = (dir / "defs.emb").string();
    index = (dir / "defs.hnsw").string();
    ASSERT_EQ(cli({"ingest", "--words", files.words.string(), "--definitions",
                   files.definitions.string(), "--synonyms", files.synonyms.string(), "--out", lex})
                  .code,
              0);
    ASSERT_EQ(cli({"embed", "--lexicon", lex, "--hash-dim", "24", "--seed", "3", "--out", emb}).code, 0);
    ASSERT_EQ(cli({"index-build", "--embeddings", emb, "--lexicon", lex, "--out", index}).code, 0);
  }

  // Vector of a definition as text, one component per token.
  std::string vector_file(std::uint64_t definition_id) {
    const auto set = load_embedding_set(emb);
    std::ostringstream s;
    s.precision(9);
    for (float x : set.find(DefinitionId(definition_id))->values()) s << x << ' ';
    const auto path = dir / ("q" + std::to_string(definition_id) + ".txt");
    write_text(path, s.str());
    return path.string();
  }
};

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(cli({}).code, cli::kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(cli({"stats", "--lexicon", "x", "--bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(cli({"ingest", "--words", "w"}).code, cli::kExitUsage);
  EXPECT_EQ(cli({"index-build", "--embeddings", "e", "--lexicon", "l", "--out", "o", "--m", "x"}).code,
            cli::kExitUsage);
  EXPECT_EQ(cli({"--help"}).code, cli::kExitOk);
}

TEST_F(CliPipeline, IngestPrintsMirroredStatsAndIsIdempotent) {
  const auto files = testing::write_pair_fixture(dir.path(), 30, true);
  const std::vector<std::string> args{"ingest", "--words", files.words.string(), "--definitions",
                                      files.definitions.string(), "--synonyms",
                                      files.synonyms.string(), "--out", lex};
  const auto first = cli(args);
  EXPECT_NE(first.out.find("raw_synonyms=30\n"), std::string::npos) << first.out;
  EXPECT_NE(first.out.find("mirrored_synonyms=60\n"), std::string::npos);
  EXPECT_NE(first.out.find("definitions[en]=30\n"), std::string::npos);
  const auto before = load_lexicon_store(lex);
  const auto second = cli(args);
  EXPECT_EQ(second.out, first.out);
  EXPECT_EQ(load_lexicon_store(lex), before);

  const auto stats = cli({"stats", "--lexicon", lex});
  EXPECT_EQ(stats.code, 0);
  EXPECT_EQ(stats.out, first.out.substr(first.out.find('\n') + 1));
}

TEST_F(CliPipeline, IngestBadLineExitsTwoWithLineNumber) {
  write_text(dir / "bad_words.tsv", "1\tet\tkoer\nnot-a-number\tet\tkass\n");
  const auto r = cli({"ingest", "--words", (dir / "bad_words.tsv").string(), "--definitions",
                      (dir / "definitions.tsv").string(), "--synonyms",
                      (dir / "synonyms.tsv").string(), "--out", (dir / "bad").string()});
  EXPECT_EQ(r.code, cli::kExitData);
  EXPECT_NE(r.err.find(":2:"), std::string::npos) << r.err;
}

TEST(Cli, StatsOnEmptyStoreIsAllZero) {
  TempDir dir;
  for (const char* f : {"w", "d", "s"}) write_text(dir / f, "");
  ASSERT_EQ(cli({"ingest", "--words", (dir / "w").string(), "--definitions", (dir / "d").string(),
                 "--synonyms", (dir / "s").string(), "--out", (dir / "lex").string()})
                .code,
            0);
  const auto r = cli({"stats", "--lexicon", (dir / "lex").string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("words=0\n"), std::string::npos);
  EXPECT_NE(r.out.find("mirrored_synonyms=0\n"), std::string::npos);
  EXPECT_NE(r.out.find("synonyms_per_word=0.0000\n"), std::string::npos);
  EXPECT_EQ(cli({"stats", "--lexicon", (dir / "nope").string()}).code, cli::kExitData);
}

TEST_F(CliPipeline, HashEmbeddingIsDeterministicAndComplete) {
  const auto again = (dir / "again.emb").string();
  ASSERT_EQ(cli({"embed", "--lexicon", lex, "--hash-dim", "24", "--seed", "3", "--out", again}).code, 0);
  EXPECT_EQ(testing::read_bytes(emb), testing::read_bytes(again));
  const auto set = load_embedding_set(emb);
  EXPECT_EQ(set.size(), 60u);
  EXPECT_EQ(set.dim(), 24u);
}

TEST_F(CliPipeline, EmbedNeedsExactlyOneMode) {
  EXPECT_EQ(cli({"embed", "--lexicon", lex, "--out", emb}).code, cli::kExitUsage);
  write_text(dir / "wv.txt", "1 2\nx 1 0\n");
  EXPECT_EQ(cli({"embed", "--lexicon", lex, "--hash-dim", "8", "--word-vectors",
                 (dir / "wv.txt").string(), "--out", emb})
                .code,
            cli::kExitUsage);
}

TEST(Cli, WordVectorEmbeddingIsTheNormalizedMean) {
  TempDir dir;
  write_text(dir / "w.tsv", "1\tet\tkoer\n2\tet\tkass\n");
  write_text(dir / "d.tsv", "10\t1\tet\ta b\n11\t2\tet\tzzz\n");
  write_text(dir / "s.tsv", "");
  write_text(dir / "wv.txt", "2 2\na 1 0\nb 0 1\n");
  ASSERT_EQ(cli({"ingest", "--words", (dir / "w.tsv").string(), "--definitions",
                 (dir / "d.tsv").string(), "--synonyms", (dir / "s.tsv").string(), "--out",
                 (dir / "lex").string()})
                .code,
            0);
  const auto r = cli({"embed", "--lexicon", (dir / "lex").string(), "--word-vectors",
                      (dir / "wv.txt").string(), "--out", (dir / "e.emb").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto set = load_embedding_set(dir / "e.emb");
  const auto v = set.find(DefinitionId(10))->values();
  EXPECT_NEAR(v[0], std::sqrt(0.5), 1e-7);
  EXPECT_NEAR(v[1], std::sqrt(0.5), 1e-7);
  EXPECT_EQ(*set.find(DefinitionId(11)), hash_embedder("11", 2, 42));
  EXPECT_EQ(testing::read_bytes(dir / "e.emb.oov.txt"), "11\n");
}

TEST_F(CliPipeline, IndexBuildEchoesDefaultsAndIsReproducible) {
  const auto again = (dir / "again.hnsw").string();
  const auto r = cli({"index-build", "--embeddings", emb, "--lexicon", lex, "--out", again});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("m=16 ef_construction=200 ef_search=128 seed=42"), std::string::npos) << r.out;
  EXPECT_EQ(testing::read_bytes(index), testing::read_bytes(again));
}

TEST_F(CliPipeline, IndexBuildDataErrorsExitTwo) {
  write_text(dir / "long.emb", testing::read_bytes(emb) + "xyz");
  EXPECT_EQ(cli({"index-build", "--embeddings", (dir / "long.emb").string(), "--lexicon", lex,
                 "--out", (dir / "x.hnsw").string()})
                .code,
            cli::kExitData);
  EmbeddingSet stranger(24, "x");
  stranger.add(DefinitionId(5555), hash_embedder("x", 24, 1));
  write_embedding_set(stranger, dir / "stranger.emb");
  EXPECT_EQ(cli({"index-build", "--embeddings", (dir / "stranger.emb").string(), "--lexicon", lex,
                 "--out", (dir / "x.hnsw").string()})
                .code,
            cli::kExitData);
  EXPECT_EQ(cli({"index-build", "--embeddings", emb, "--lexicon", lex, "--m", "1", "--out",
                 (dir / "x.hnsw").string()})
                .code,
            cli::kExitUsage);
}

TEST_F(CliPipeline, SearchPrintsRankedTable) {
  const auto q = vector_file(105);
  const auto r = cli({"search", "--index", index, "--lexicon", lex, "--vector-file", q, "--limit", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("rank\tword\tscore\tdefinition\n", 0), 0u);
  EXPECT_LE(count_lines(r.out), 6u);
  // Words 5 and 6 share the same definition vector.
  EXPECT_TRUE(r.out.find("\n1\tword5\t1.0000\t") != std::string::npos ||
              r.out.find("\n1\tword6\t1.0000\t") != std::string::npos)
      << r.out;

  const auto en = cli({"search", "--index", index, "--lexicon", lex, "--vector-file", q, "--lang", "en"});
  ASSERT_EQ(en.code, 0);
  std::istringstream lines(en.out);
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    const auto word = std::stoul(line.substr(line.find("word") + 4));
    EXPECT_EQ(word % 2, 1u) << line;
  }
}

TEST_F(CliPipeline, SearchErrors) {
  std::string row = "known 1";
  for (int i = 1; i < 24; ++i) row += " 0";
  write_text(dir / "wv.txt", "1 24\n" + row + "\n");
  const auto oov = cli({"search", "--index", index, "--lexicon", lex, "--query", "unknown words",
                        "--word-vectors", (dir / "wv.txt").string()});
  EXPECT_EQ(oov.code, cli::kExitData) << oov.err;
  EXPECT_NE(oov.err.find("EmbeddingFailure"), std::string::npos);
  const auto q = vector_file(101);
  EXPECT_EQ(cli({"search", "--index", index, "--lexicon", lex, "--vector-file", q, "--limit", "101"}).code,
            cli::kExitUsage);
  EXPECT_EQ(cli({"search", "--index", index, "--lexicon", lex}).code, cli::kExitUsage);
  write_text(dir / "short.txt", "1 0 0");
  EXPECT_EQ(cli({"search", "--index", index, "--lexicon", lex, "--vector-file",
                 (dir / "short.txt").string()})
                .code,
            cli::kExitData);
}

TEST_F(CliPipeline, UnlabeledEvalOnSynonymPairs) {
  const auto report = (dir / "report.txt").string();
  const auto r = cli({"eval-unlabeled", "--index", index, "--lexicon", lex, "--embeddings", emb,
                      "--report", report});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Median Rank=1\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("MRR=1.000000\n"), std::string::npos);
  const auto text = testing::read_bytes(report);
  EXPECT_EQ(text, r.out);
  for (const char* column : {"MAP=", "MP@1=", "MP@10=", "MRR=", "Acc@1=", "Acc@10=", "Median Rank="}) {
    EXPECT_NE(text.find(column), std::string::npos) << column;
  }
  EXPECT_TRUE(std::filesystem::exists(report + ".json"));

  const auto non_et = cli({"eval-unlabeled", "--index", index, "--lexicon", lex, "--embeddings", emb,
                           "--queries-non-et"});
  ASSERT_EQ(non_et.code, 0);
  EXPECT_NE(non_et.out.find("query_count=30\n"), std::string::npos) << non_et.out;
}

TEST(Cli, NonEstonianQueriesOnEstonianDataExitTwo) {
  TempDir dir;
  const auto files = testing::write_pair_fixture(dir.path(), 5, false);
  const auto lex = (dir / "lex").string(), emb = (dir / "e.emb").string(), idx = (dir / "i.hnsw").string();
  ASSERT_EQ(cli({"ingest", "--words", files.words.string(), "--definitions", files.definitions.string(),
                 "--synonyms", files.synonyms.string(), "--out", lex})
                .code,
            0);
  ASSERT_EQ(cli({"embed", "--lexicon", lex, "--hash-dim", "8", "--out", emb}).code, 0);
  ASSERT_EQ(cli({"index-build", "--embeddings", emb, "--lexicon", lex, "--out", idx}).code, 0);
  const auto r = cli({"eval-unlabeled", "--index", idx, "--lexicon", lex, "--embeddings", emb,
                      "--queries-non-et"});
  EXPECT_EQ(r.code, cli::kExitData);
  EXPECT_NE(r.err.find("EmptyJudgments"), std::string::npos) << r.err;
}

TEST_F(CliPipeline, UnlabeledEvalMissingEmbeddingExitsTwo) {
  EmbeddingSet partial(24, "partial");
  const auto full = load_embedding_set(emb);
  for (const auto& [id, v] : full.entries()) {
    if (id != DefinitionId(110)) partial.add(id, v);
  }
  write_embedding_set(partial, dir / "partial.emb");
  const auto r = cli({"eval-unlabeled", "--index", index, "--lexicon", lex, "--embeddings",
                      (dir / "partial.emb").string()});
  EXPECT_EQ(r.code, cli::kExitData);
  EXPECT_NE(r.err.find("110"), std::string::npos);
}

struct LabeledCli : ::testing::Test {
  TempDir dir;
  std::string lex, emb, index, wv;
  void SetUp() override {
    const auto files = testing::write_pair_fixture(dir.path(), 10, false);
    std::ostringstream table;
    table << "13 6\n";
    std::vector<std::string> tokens{"pair", "shared", "meaning"};
    for (int n = 0; n < 10; ++n) tokens.push_back(std::to_string(n));
    for (const auto& tok : tokens) {
      const auto v = hash_embedder(tok, 6, 9);
      table << tok;
      for (float x : v.values()) table << ' ' << x;
      table << '\n';
    }
    wv = (dir / "wv.txt").string();
    write_text(wv, table.str());
    lex = (dir / "lex").string();
    emb = (dir / "e.emb").string();
    index = (dir / "i.hnsw").string();
    ASSERT_EQ(cli({"ingest", "--words", files.words.string(), "--definitions",
                   files.definitions.string(), "--synonyms", files.synonyms.string(), "--out", lex})
                  .code,
              0);
    ASSERT_EQ(cli({"embed", "--lexicon", lex, "--word-vectors", wv, "--out", emb}).code, 0);
    ASSERT_EQ(cli({"index-build", "--embeddings", emb, "--lexicon", lex, "--out", index}).code, 0);
  }
  Result eval(const std::string& dataset) {
    write_text(dir / "ds.tsv", dataset);
    return cli({"eval-labeled", "--index", index, "--lexicon", lex, "--dataset",
                (dir / "ds.tsv").string(), "--word-vectors", wv, "--report",
                (dir / "labeled.txt").string()});
  }
};

TEST_F(LabeledCli, ExactMatchItemHasPerfectMap) {
  const auto r = eval("7\t107\tet\tpair 3 shared meaning\n");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("MAP=1.000000\n"), std::string::npos) << r.out;
}

TEST_F(LabeledCli, ThreeLanguageBlocks) {
  const auto r = eval("7\t107\tet\tpair 3 shared meaning\n1\t101\ten\tpair 0 meaning\n"
                      "4\t104\tru\tshared 1\n");
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* block : {"[et]\n", "[en]\n", "[ru]\n"}) {
    EXPECT_NE(r.out.find(block), std::string::npos) << block;
  }
  const auto text = testing::read_bytes(dir / "labeled.txt");
  for (const char* key : {"et.MAP=", "en.MAP=", "ru.MAP="}) EXPECT_NE(text.find(key), std::string::npos);
}

TEST_F(LabeledCli, UnknownTargetExitsTwo) {
  const auto r = eval("999\t107\tet\tpair 3\n");
  EXPECT_EQ(r.code, cli::kExitData);
  EXPECT_NE(r.err.find("MissingTarget"), std::string::npos);
}

// Runs the real binary; stdout is captured through a pipe.
class Child {
 public:
  Child(const std::vector<std::string>& args, const std::vector<std::string>& env_extra = {}) {
    int fds[2];
    if (pipe(fds) != 0) throw std::runtime_error("pipe");
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
    posix_spawn_file_actions_addclose(&actions, fds[0]);
    std::vector<std::string> argv_s{SONAHUNT_BINARY};
    argv_s.insert(argv_s.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_s) argv.push_back(a.data());
    argv.push_back(nullptr);
    std::vector<std::string> env_s(env_extra);
    for (char** e = environ; *e != nullptr; ++e) env_s.emplace_back(*e);
    std::vector<char*> envp;
    for (auto& e : env_s) envp.push_back(e.data());
    envp.push_back(nullptr);
    if (posix_spawn(&pid_, SONAHUNT_BINARY, &actions, nullptr, argv.data(), envp.data()) != 0) {
      throw std::runtime_error("spawn");
    }
    posix_spawn_file_actions_destroy(&actions);
    close(fds[1]);
    out_ = fdopen(fds[0], "r");
  }
  ~Child() {
    if (pid_ > 0) {
      kill(pid_, SIGKILL);
      waitpid(pid_, nullptr, 0);
    }
    if (out_ != nullptr) fclose(out_);
  }
  // Next stdout line without the newline, or "" at EOF.
  std::string line() {
    char buf[512];
    if (fgets(buf, sizeof(buf), out_) == nullptr) return "";
    std::string s(buf);
    if (!s.empty() && s.back() == '\n') s.pop_back();
    return s;
  }
  void signal(int sig) { kill(pid_, sig); }
  int wait() {
    int status = 0;
    waitpid(pid_, &status, 0);
    pid_ = -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  }

 private:
  pid_t pid_ = -1;
  FILE* out_ = nullptr;
};

int port_of(const std::string& listening_line) {
  std::smatch m;
  const std::regex re(":(\\d+)$");
  if (!std::regex_search(listening_line, m, re)) return -1;
  return std::stoi(m[1]);
}

TEST_F(CliPipeline, ServeAnswersAndShutsDownOnSigint) {
  Child child({"serve", "--index", index, "--lexicon", lex, "--port", "0", "--host", "127.0.0.1"});
  const int port = port_of(child.line());
  ASSERT_GT(port, 0);
  EXPECT_EQ(child.line(), "ready");
  httplib::Client client("127.0.0.1", port);
  const auto health = client.Get("/api/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(nlohmann::json::parse(health->body)["status"], "ok");
  EXPECT_EQ(nlohmann::json::parse(health->body)["points"], 60);
  child.signal(SIGINT);
  EXPECT_EQ(child.wait(), 0);
}

TEST_F(CliPipeline, ServeReadsDataDirFromEnvironmentAndStopsOnSigterm) {
  std::filesystem::copy_file(index, std::filesystem::path(lex) / "index.hnsw");
  Child child({"serve", "--host", "127.0.0.1", "--port", "0"}, {"SONAHUNT_DATA_DIR=" + lex});
  const int port = port_of(child.line());
  ASSERT_GT(port, 0);
  EXPECT_EQ(child.line(), "ready");
  httplib::Client client("127.0.0.1", port);
  EXPECT_EQ(client.Get("/api/words/1")->status, 200);
  child.signal(SIGTERM);
  EXPECT_EQ(child.wait(), 0);
}

TEST_F(CliPipeline, ServePortConflictExitsOne) {
  httplib::Server blocker;
  const int port = blocker.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  Child child({"serve", "--index", index, "--lexicon", lex, "--host", "127.0.0.1"},
              {"SONAHUNT_PORT=" + std::to_string(port)});
  EXPECT_EQ(child.wait(), cli::kExitUsage);
}

TEST_F(CliPipeline, ServeWithUnreadableIndexExitsTwo) {
  Child child({"serve", "--index", (dir / "missing.hnsw").string(), "--lexicon", lex, "--port", "0",
               "--host", "127.0.0.1"});
  EXPECT_EQ(child.wait(), cli::kExitData);
}

TEST(Cli, ShippedTinyFixtureWalkthrough) {
  const std::filesystem::path data = SONAHUNT_FIXTURE_DIR;
  TempDir dir;
  const auto lex = (dir / "lex").string();
  const auto emb = (dir / "defs.emb").string();
  const auto index = (dir / "index.hnsw").string();
  const auto vectors = (data / "word_vectors.txt").string();

  auto r = cli({"ingest", "--words", (data / "words.tsv").string(), "--definitions",
                (data / "definitions.tsv").string(), "--synonyms", (data / "synonyms.tsv").string(),
                "--out", lex});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* line : {"words=10\n", "mirrored_synonyms=8\n", "dropped_non_word_relations=1\n"}) {
    EXPECT_NE(r.out.find(line), std::string::npos) << line;
  }
  r = cli({"embed", "--lexicon", lex, "--word-vectors", vectors, "--out", emb});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("oov_fallback=0"), std::string::npos) << r.out;
  r = cli({"index-build", "--embeddings", emb, "--lexicon", lex, "--out", index});
  ASSERT_EQ(r.code, 0) << r.err;
  r = cli({"search", "--index", index, "--lexicon", lex, "--word-vectors", vectors, "--query",
           "animal that barks", "--limit", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(r.out), 6u);
  r = cli({"eval-unlabeled", "--index", index, "--lexicon", lex, "--embeddings", emb, "--exact"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("query_count=17\n"), std::string::npos) << r.out;
  r = cli({"eval-labeled", "--index", index, "--lexicon", lex, "--dataset",
           (data / "labeled.tsv").string(), "--word-vectors", vectors});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* block : {"[en]\n", "[et]\n", "[ru]\n"}) {
    EXPECT_NE(r.out.find(block), std::string::npos) << block;
  }
}

}  // namespace
}  // namespace sonahunt
