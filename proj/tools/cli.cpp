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

#include "cli.hpp"

#include <pthread.h>
#include <signal.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>

#include "sonahunt/embedding.hpp"
#include "sonahunt/error.hpp"
#include "sonahunt/eval_runner.hpp"
#include "sonahunt/ground_truth.hpp"
#include "sonahunt/hnsw_index.hpp"
#include "sonahunt/lexicon.hpp"
#include "sonahunt/lexicon_store.hpp"
#include "sonahunt/report_io.hpp"
#include "sonahunt/service.hpp"

namespace sonahunt::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kDefaultPort = 8080;

struct IngestOptions {
  fs::path words, definitions, synonyms, out;
};

struct EmbedOptions {
  fs::path lexicon, word_vectors, out;
  std::size_t hash_dim = 0;
  std::uint64_t seed = 42;
};

struct IndexBuildOptions {
  fs::path embeddings, lexicon, out;
  HnswParams params;
};

struct SearchOptions {
  fs::path index, lexicon, vector_file, word_vectors;
  std::string query, language;
  std::size_t limit = kDefaultSearchLimit;
};

struct EvalOptions {
  fs::path index, lexicon, embeddings, dataset, word_vectors, report;
  std::size_t n = kResultLimit;
  std::size_t fetch_multiplier = 5;
  std::optional<std::size_t> ef;
  bool non_estonian = false;
  bool exact = false;
  std::size_t threads = 1;
};

struct ServeOptions {
  fs::path index, lexicon, word_vectors;
  std::string host = "0.0.0.0";
  std::string cors_origin = "*";
  std::optional<int> port;
};

void print_stats(std::ostream& out, const Lexicon& lexicon) {
  const auto stats = lexicon_stats(lexicon);
  out << "words=" << stats.word_count << '\n';
  for (const auto& [lang, count] : stats.definition_count_by_language) {
    out << "definitions[" << lang << "]=" << count << '\n';
  }
  out << "raw_synonyms=" << stats.raw_synonym_count << '\n'
      << "mirrored_synonyms=" << stats.mirrored_synonym_count << '\n'
      << "words_with_synonyms=" << stats.words_with_synonyms << '\n'
      << "synonyms_per_word=" << std::fixed << std::setprecision(4) << stats.avg_synonyms_per_word
      << std::defaultfloat << '\n'
      << "dropped_self_synonyms=" << lexicon.warnings().self_synonyms << '\n'
      << "dropped_non_word_relations=" << lexicon.warnings().non_word_relations << '\n'
      << "duplicate_synonyms=" << lexicon.warnings().duplicate_synonyms << '\n';
}

int cmd_ingest(const IngestOptions& o, std::ostream& out) {
  const auto lexicon = load_lexicon(o.words, o.definitions, o.synonyms);
  save_lexicon_store(lexicon, o.out);
  out << "# lexicon store: " << (o.out / kLexiconStoreFile).string() << '\n';
  print_stats(out, lexicon);
  return kExitOk;
}

int cmd_stats(const fs::path& dir, std::ostream& out) {
  print_stats(out, load_lexicon_store(dir));
  return kExitOk;
}

int cmd_embed(const EmbedOptions& o, std::ostream& out, std::ostream& err) {
  const bool table_mode = !o.word_vectors.empty();
  if (table_mode == (o.hash_dim > 0)) {
    err << "embed: give exactly one of --word-vectors or --hash-dim\n";
    return kExitUsage;
  }
  const auto lexicon = load_lexicon_store(o.lexicon);

  std::optional<WordVectorTable> table;
  if (table_mode) table = load_word_vectors(o.word_vectors);
  const std::size_t dim = table ? table->dim() : o.hash_dim;
  const std::string model = table ? "word-average:" + o.word_vectors.stem().string()
                                  : "hash:dim=" + std::to_string(dim) + ",seed=" + std::to_string(o.seed);

  EmbeddingSet set(dim, model);
  std::vector<DefinitionId> fallback;
  for (const auto& def : lexicon.definitions()) {
    if (!table) {
      set.add(def.id, hash_embedder(def.text, dim, o.seed));
      continue;
    }
    try {
      set.add(def.id, embed_average(def.text, *table));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kAllTokensOutOfVocabulary) throw;
      // Out-of-vocabulary definitions still need a vector to stay searchable.
      set.add(def.id, hash_embedder(std::to_string(def.id.value), dim, o.seed));
      fallback.push_back(def.id);
    }
  }
  write_embedding_set(set, o.out);

  out << "# model=" << model << " dim=" << dim << " seed=" << o.seed << '\n';
  out << "embedded=" << set.size() << '\n';
  if (table) {
    const fs::path sidecar = o.out.string() + ".oov.txt";
    std::ofstream list(sidecar, std::ios::trunc);
    if (!list) throw Error(ErrorCode::kIoFailure, "cannot write " + sidecar.string());
    for (const auto id : fallback) list << id.value << '\n';
    out << "oov_fallback=" << fallback.size() << " (" << sidecar.string() << ")\n";
  }
  return kExitOk;
}

std::vector<IndexedPoint> join_points(const EmbeddingSet& set, const Lexicon& lexicon) {
  std::vector<IndexedPoint> points;
  points.reserve(set.size());
  for (const auto& [id, vector] : set.entries()) {
    const auto* def = lexicon.find_definition(id);
    if (def == nullptr) {
      throw Error(ErrorCode::kDanglingReference,
                  "embedding for definition_id " + std::to_string(id.value) + " not in lexicon");
    }
    points.push_back({normalize(vector), {def->id, def->word_id, def->language}});
  }
  return points;
}

int cmd_index_build(const IndexBuildOptions& o, std::ostream& out) {
  o.params.validate();
  const auto set = load_embedding_set(o.embeddings);
  const auto lexicon = load_lexicon_store(o.lexicon);
  const auto points = join_points(set, lexicon);
  const auto index = HnswIndex::build(points, o.params);
  index.save(o.out);
  out << "# m=" << o.params.m << " ef_construction=" << o.params.ef_construction
      << " ef_search=" << o.params.ef_search << " seed=" << o.params.seed << '\n'
      << "points=" << index.size() << '\n'
      << "dim=" << index.dim() << '\n'
      << "max_level=" << index.max_level() << '\n';
  return kExitOk;
}

std::vector<float> read_vector_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::vector<float> values;
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      values.push_back(std::stof(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kMalformedRecord, path.string() + ": bad component '" + token + "'");
    }
  }
  return values;
}

int cmd_search(const SearchOptions& o, std::ostream& out, std::ostream& err) {
  if (o.query.empty() == o.vector_file.empty()) {
    err << "search: give exactly one of --query or --vector-file\n";
    return kExitUsage;
  }
  if (!o.query.empty() && o.word_vectors.empty()) {
    err << "search: --query needs --word-vectors\n";
    return kExitUsage;
  }
  auto data = std::make_shared<ServiceData>(
      ServiceData{HnswIndex::load(o.index), load_lexicon_store(o.lexicon), std::nullopt});
  if (!o.word_vectors.empty()) data->word_vectors = load_word_vectors(o.word_vectors);
  const SearchService service(std::move(data));

  nlohmann::json request{{"limit", o.limit}};
  if (!o.query.empty()) request["query"] = o.query;
  else request["query_vector"] = read_vector_file(o.vector_file);
  if (!o.language.empty()) request["language"] = o.language;

  const auto response = service.handle_search(request);
  if (response.status != 200) {
    err << "search: " << response.body.value("error", "Error") << ": "
        << response.body.value("message", "failed") << '\n';
    return kExitData;
  }
  out << "rank\tword\tscore\tdefinition\n";
  for (const auto& hit : response.body["hits"]) {
    out << hit["rank"].get<std::size_t>() << '\t' << hit["word_surface"].get<std::string>() << '\t'
        << std::fixed << std::setprecision(4) << hit["score"].get<double>() << std::defaultfloat
        << '\t' << hit["matched_definition_text"].get<std::string>() << '\n';
  }
  return kExitOk;
}

ReportHeader eval_header(const std::string& protocol, const std::string& model,
                         const HnswIndex& index, const EvalOptions& o) {
  return {{"protocol", protocol},
          {"model", model},
          {"retrieval", o.exact ? "exact" : "hnsw"},
          {"n", std::to_string(o.n)},
          {"fetch_multiplier", std::to_string(o.fetch_multiplier)},
          {"ef_search", std::to_string(o.ef.value_or(index.params().ef_search))},
          {"m", std::to_string(index.params().m)},
          {"ef_construction", std::to_string(index.params().ef_construction)},
          {"seed", std::to_string(index.params().seed)},
          {"points", std::to_string(index.size())}};
}

std::unique_ptr<Retriever> make_retriever(const HnswIndex& index, const EvalOptions& o,
                                          std::vector<IndexedPoint>& storage) {
  if (!o.exact) return std::make_unique<HnswRetriever>(index, o.ef);
  storage.reserve(index.size());
  for (HnswIndex::NodeId n = 0; n < index.size(); ++n) {
    const auto v = index.vector(n);
    storage.push_back({EmbeddingVector(std::vector<float>(v.begin(), v.end())), index.payload(n)});
  }
  return std::make_unique<ExactRetriever>(storage);
}

UnlabeledEvalConfig eval_config(const EvalOptions& o) {
  UnlabeledEvalConfig cfg;
  cfg.candidates = o.n;
  cfg.fetch_multiplier = o.fetch_multiplier;
  cfg.query_languages = o.non_estonian ? QueryLanguages::kNonEstonian : QueryLanguages::kAll;
  cfg.threads = o.threads;
  return cfg;
}

int cmd_eval_unlabeled(const EvalOptions& o, std::ostream& out) {
  const auto index = HnswIndex::load(o.index);
  const auto lexicon = load_lexicon_store(o.lexicon);
  const auto embeddings = load_embedding_set(o.embeddings);
  const auto gt = GroundTruth::build(lexicon);
  std::vector<IndexedPoint> storage;
  const auto retriever = make_retriever(index, o, storage);

  auto header = eval_header("unlabeled", embeddings.model_name(), index, o);
  header.emplace_back("queries", o.non_estonian ? "non-et" : "all");
  const auto report = run_unlabeled_eval(*retriever, lexicon, gt, embeddings, eval_config(o));
  write_report_text(out, header, report);
  if (!o.report.empty()) write_report_files(o.report, header, report);
  return kExitOk;
}

int cmd_eval_labeled(const EvalOptions& o, std::ostream& out) {
  const auto index = HnswIndex::load(o.index);
  const auto lexicon = load_lexicon_store(o.lexicon);
  const auto dataset = load_labeled_dataset(o.dataset);
  const auto table = load_word_vectors(o.word_vectors);
  const auto gt = GroundTruth::build(lexicon);
  std::vector<IndexedPoint> storage;
  const auto retriever = make_retriever(index, o, storage);

  const auto header =
      eval_header("labeled", "word-average:" + o.word_vectors.stem().string(), index, o);
  const auto reports = run_labeled_eval(
      *retriever, lexicon, gt, dataset,
      [&](std::string_view text) { return embed_average(text, table); }, eval_config(o));
  for (const auto& [key, value] : header) out << key << '=' << value << '\n';
  for (const auto& [language, report] : reports) {
    out << "[" << language << "]\n";
    write_report_text(out, {}, report);
  }
  if (!o.report.empty()) write_report_files(o.report, header, reports);
  return kExitOk;
}

std::optional<std::string> env(const char* name) {
  const char* value = std::getenv(name);
  if (value == nullptr || *value == '\0') return std::nullopt;
  return std::string(value);
}

int cmd_serve(ServeOptions o, std::ostream& out, std::ostream& err) {
  if (const auto dir = env("SONAHUNT_DATA_DIR")) {
    if (o.index.empty()) o.index = fs::path(*dir) / "index.hnsw";
    if (o.lexicon.empty()) o.lexicon = *dir;
    if (o.word_vectors.empty() && fs::exists(fs::path(*dir) / "word_vectors.txt")) {
      o.word_vectors = fs::path(*dir) / "word_vectors.txt";
    }
  }
  if (o.index.empty() || o.lexicon.empty()) {
    err << "serve: --index and --lexicon (or SONAHUNT_DATA_DIR) are required\n";
    return kExitUsage;
  }
  int port = kDefaultPort;
  if (o.port) {
    port = *o.port;
  } else if (const auto p = env("SONAHUNT_PORT")) {
    try {
      port = std::stoi(*p);
    } catch (const std::exception&) {
      err << "serve: SONAHUNT_PORT is not a number\n";
      return kExitUsage;
    }
  }

  // Signals are taken synchronously by this thread; workers inherit the mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  SearchService service;
  httplib::Server server;
  // No SO_REUSEPORT, so a second instance on the same port fails to bind.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  register_routes(server, service, o.cors_origin);
  if (port == 0) {
    port = server.bind_to_any_port(o.host);
  } else if (!server.bind_to_port(o.host, port)) {
    port = -1;
  }
  if (port < 0) {
    err << "serve: cannot bind " << o.host << ':' << (o.port ? *o.port : port) << '\n';
    pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
    return kExitUsage;
  }
  std::thread listener([&] { server.listen_after_bind(); });
  out << "listening on http://" << o.host << ':' << port << std::endl;

  std::atomic<bool> load_failed = false;
  std::string load_error;
  std::thread loader([&] {
    try {
      auto data = std::make_shared<ServiceData>(
          ServiceData{HnswIndex::load(o.index), load_lexicon_store(o.lexicon), std::nullopt});
      if (!o.word_vectors.empty()) data->word_vectors = load_word_vectors(o.word_vectors);
      service.set_ready(std::move(data));
    } catch (const std::exception& e) {
      load_error = e.what();
      load_failed = true;
    }
  });

  bool ready_reported = false;
  while (!load_failed) {
    timespec tick{0, 100'000'000};
    if (sigtimedwait(&signals, nullptr, &tick) > 0) break;
    if (!ready_reported && service.ready()) {
      out << "ready" << std::endl;
      ready_reported = true;
    }
  }
  server.stop();
  listener.join();
  loader.join();
  pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
  if (load_failed) {
    err << "serve: " << load_error << '\n';
    return kExitData;
  }
  out << "shutdown" << std::endl;
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"sonahunt: reverse-dictionary search over definition embeddings"};
  app.name("sonahunt");
  app.require_subcommand(1);

  IngestOptions ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Load TSV lexicon files into a lexicon store");
  c_ingest->add_option("--words", ingest.words, "word_id<TAB>language<TAB>surface")->required();
  c_ingest->add_option("--definitions", ingest.definitions,
                       "definition_id<TAB>word_id<TAB>language<TAB>text")->required();
  c_ingest->add_option("--synonyms", ingest.synonyms, "source_word_id<TAB>target_word_id")->required();
  c_ingest->add_option("--out", ingest.out, "Output directory")->required();

  EmbedOptions embed;
  auto* c_embed = app.add_subcommand("embed", "Embed every definition of a lexicon store");
  c_embed->add_option("--lexicon", embed.lexicon, "Lexicon store directory")->required();
  c_embed->add_option("--word-vectors", embed.word_vectors, "Word-vector table (averaging embedder)");
  c_embed->add_option("--hash-dim", embed.hash_dim, "Use the hash embedder with this dimension");
  c_embed->add_option("--seed", embed.seed, "Seed for the hash embedder")->capture_default_str();
  c_embed->add_option("--out", embed.out, "Output embedding file")->required();

  IndexBuildOptions build;
  auto* c_build = app.add_subcommand("index-build", "Build an HNSW index from an embedding file");
  c_build->add_option("--embeddings", build.embeddings, "Embedding file")->required();
  c_build->add_option("--lexicon", build.lexicon, "Lexicon store directory")->required();
  c_build->add_option("--m", build.params.m, "Links per node")->capture_default_str();
  c_build->add_option("--ef-construction", build.params.ef_construction, "Build candidate list")
      ->capture_default_str();
  c_build->add_option("--ef-search", build.params.ef_search, "Default query candidate list")
      ->capture_default_str();
  c_build->add_option("--seed", build.params.seed, "Level sampling seed")->capture_default_str();
  c_build->add_option("--out", build.out, "Output index file")->required();

  SearchOptions search;
  auto* c_search = app.add_subcommand("search", "Look up words by description");
  c_search->add_option("--index", search.index, "Index file")->required();
  c_search->add_option("--lexicon", search.lexicon, "Lexicon store directory")->required();
  c_search->add_option("--query", search.query, "Description text");
  c_search->add_option("--word-vectors", search.word_vectors, "Word-vector table for --query");
  c_search->add_option("--vector-file", search.vector_file, "Whitespace-separated query vector");
  c_search->add_option("--lang", search.language, "Only definitions in this language");
  c_search->add_option("--limit", search.limit, "Words to print")
      ->check(CLI::Range(std::size_t{1}, kMaxSearchLimit))
      ->capture_default_str();

  EvalOptions unlabeled;
  auto* c_unlabeled = app.add_subcommand("eval-unlabeled", "Synonymy-based evaluation");
  c_unlabeled->add_option("--index", unlabeled.index, "Index file")->required();
  c_unlabeled->add_option("--lexicon", unlabeled.lexicon, "Lexicon store directory")->required();
  c_unlabeled->add_option("--embeddings", unlabeled.embeddings, "Query embeddings")->required();
  c_unlabeled->add_option("--n", unlabeled.n, "Words retrieved per query")->capture_default_str();
  c_unlabeled->add_option("--fetch-multiplier", unlabeled.fetch_multiplier,
                          "Definition hits fetched per word")->capture_default_str();
  c_unlabeled->add_option("--ef", unlabeled.ef, "Override the index ef_search");
  c_unlabeled->add_flag("--queries-non-et", unlabeled.non_estonian,
                        "Only non-Estonian definitions are used as queries");
  c_unlabeled->add_flag("--exact", unlabeled.exact, "Brute-force retrieval instead of HNSW");
  c_unlabeled->add_option("--threads", unlabeled.threads, "Query threads")->capture_default_str();
  c_unlabeled->add_option("--report", unlabeled.report, "Report path (.json written alongside)");

  EvalOptions labeled;
  auto* c_labeled = app.add_subcommand("eval-labeled", "Evaluation on a labeled dataset");
  c_labeled->add_option("--index", labeled.index, "Index file")->required();
  c_labeled->add_option("--lexicon", labeled.lexicon, "Lexicon store directory")->required();
  c_labeled->add_option("--dataset", labeled.dataset, "Labeled dataset file")->required();
  c_labeled->add_option("--word-vectors", labeled.word_vectors, "Word-vector table")->required();
  c_labeled->add_option("--n", labeled.n, "Words retrieved per query")->capture_default_str();
  c_labeled->add_option("--fetch-multiplier", labeled.fetch_multiplier,
                        "Definition hits fetched per word")->capture_default_str();
  c_labeled->add_option("--ef", labeled.ef, "Override the index ef_search");
  c_labeled->add_flag("--exact", labeled.exact, "Brute-force retrieval instead of HNSW");
  c_labeled->add_option("--threads", labeled.threads, "Query threads")->capture_default_str();
  c_labeled->add_option("--report", labeled.report, "Report path (.json written alongside)");

  fs::path stats_dir;
  auto* c_stats = app.add_subcommand("stats", "Print lexicon statistics");
  c_stats->add_option("--lexicon", stats_dir, "Lexicon store directory")->required();

  ServeOptions serve;
  auto* c_serve = app.add_subcommand("serve", "Run the HTTP search service");
  c_serve->add_option("--index", serve.index, "Index file");
  c_serve->add_option("--lexicon", serve.lexicon, "Lexicon store directory");
  c_serve->add_option("--word-vectors", serve.word_vectors, "Enables text queries");
  c_serve->add_option("--port", serve.port, "Port (env SONAHUNT_PORT, default 8080)");
  c_serve->add_option("--host", serve.host, "Bind address")->capture_default_str();
  c_serve->add_option("--cors-origin", serve.cors_origin, "Allowed CORS origin")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*c_ingest) return cmd_ingest(ingest, out);
    if (*c_embed) return cmd_embed(embed, out, err);
    if (*c_build) return cmd_index_build(build, out);
    if (*c_search) return cmd_search(search, out, err);
    if (*c_unlabeled) return cmd_eval_unlabeled(unlabeled, out);
    if (*c_labeled) return cmd_eval_labeled(labeled, out);
    if (*c_stats) return cmd_stats(stats_dir, out);
    if (*c_serve) return cmd_serve(serve, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::kInvalidArgument ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace sonahunt::cli
