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

#include "sonahunt/eval_runner.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "sonahunt/error.hpp"
#include "text_util.hpp"

namespace sonahunt {

namespace {

// Runs fn(i) for i in [0, n) over `threads` workers. Results must be written
// by index so the outcome does not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
}

std::size_t fetch_count(const UnlabeledEvalConfig& cfg) {
  if (cfg.candidates == 0) throw Error(ErrorCode::kInvalidArgument, "candidates must be >= 1");
  if (cfg.fetch_multiplier == 0) {
    throw Error(ErrorCode::kInvalidArgument, "fetch_multiplier must be >= 1");
  }
  return cfg.candidates * cfg.fetch_multiplier;
}

EvalReport empty_report(std::size_t skipped) {
  EvalReport report;
  for (const std::size_t k : kReportedCutoffs) {
    report.mp_at[k] = 0.0;
    report.acc_at[k] = 0.0;
  }
  report.skipped_queries = skipped;
  return report;
}

}  // namespace

HnswRetriever::HnswRetriever(const HnswIndex& index, std::optional<std::size_t> ef)
    : index_(index), ef_(ef.value_or(index.params().ef_search)) {
  ids_.reserve(index.size());
  for (HnswIndex::NodeId n = 0; n < index.size(); ++n) ids_.insert(index.payload(n).definition_id);
}

std::vector<SearchHit> HnswRetriever::retrieve(std::span<const float> query, std::size_t k) const {
  return index_.search(query, k, ef_);
}

ExactRetriever::ExactRetriever(std::span<const IndexedPoint> points) : points_(points) {
  ids_.reserve(points.size());
  for (const auto& p : points) ids_.insert(p.payload.definition_id);
}

std::vector<SearchHit> ExactRetriever::retrieve(std::span<const float> query, std::size_t k) const {
  return brute_force_search(points_, query, k);
}

std::vector<WordHit> dedup_hits_to_words(std::span<const SearchHit> hits, std::size_t limit) {
  std::vector<WordHit> out;
  std::unordered_set<WordId> seen;
  for (const auto& h : hits) {
    if (out.size() >= limit) break;
    if (seen.insert(h.payload.word_id).second) out.push_back({h.payload.word_id, h});
  }
  return out;
}

RankedResult dedup_to_words(std::span<const SearchHit> hits, std::size_t limit,
                            std::uint64_t query_id) {
  RankedResult ranked{query_id, {}};
  for (const auto& wh : dedup_hits_to_words(hits, limit)) ranked.words.push_back(wh.word_id);
  return ranked;
}

EvalReport run_unlabeled_eval(const Retriever& retriever, const Lexicon& lexicon,
                              const GroundTruth& gt, const EmbeddingSet& embeddings,
                              const UnlabeledEvalConfig& cfg) {
  const std::size_t fetch = fetch_count(cfg) + 1;  // +1 for the query's own hit

  std::vector<const DefinitionEntry*> queries;
  for (const DefinitionId id : filter_eligible_queries(lexicon)) {
    const auto* def = lexicon.find_definition(id);
    if (cfg.query_languages == QueryLanguages::kNonEstonian && def->language == kEstonian) continue;
    if (embeddings.find(id) == nullptr) {
      throw Error(ErrorCode::kMissingEmbedding,
                  "eligible definition_id " + std::to_string(id.value) + " has no vector");
    }
    queries.push_back(def);
  }

  const IndexedPredicate indexed = [&](DefinitionId d) { return retriever.contains(d); };
  std::vector<std::optional<JudgedQuery>> judged(queries.size());
  parallel_for(queries.size(), cfg.threads, [&](std::size_t q) {
    const auto& def = *queries[q];
    const auto vector = normalize(*embeddings.find(def.id));
    auto hits = retriever.retrieve(vector.values(), fetch);
    std::erase_if(hits, [&](const SearchHit& h) { return h.payload.definition_id == def.id; });

    auto relevant = retrievable_relevant_set(gt, def.word_id, def.id, lexicon, indexed);
    if (relevant.empty()) return;
    JudgedQuery jq;
    jq.rel_size = relevant.size();
    jq.judgment = {dedup_to_words(hits, cfg.candidates, def.id.value), std::move(relevant)};
    judged[q] = std::move(jq);
  });

  std::vector<JudgedQuery> kept;
  kept.reserve(judged.size());
  for (auto& j : judged) {
    if (j) kept.push_back(std::move(*j));
  }
  EvalReport report = aggregate(kept);
  report.skipped_queries = queries.size() - kept.size();
  return report;
}

std::map<LanguageCode, std::vector<std::size_t>> LabeledDataset::by_language() const {
  std::map<LanguageCode, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < items.size(); ++i) groups[items[i].query_language].push_back(i);
  return groups;
}

LabeledDataset load_labeled_dataset(const std::filesystem::path& path) {
  LabeledDataset dataset;
  detail::RecordReader reader(path);
  std::string line;
  while (reader.next(line)) {
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 4) reader.fail("record", "expected 4 tab-separated fields");
    const auto word = detail::parse_u64(fields[0]);
    if (!word) reader.fail("target_word_id", "not an unsigned 64-bit integer");
    const auto def = detail::parse_u64(fields[1]);
    if (!def) reader.fail("target_definition_id", "not an unsigned 64-bit integer");
    const auto language = detail::trim(fields[2]);
    if (language.empty()) reader.fail("query_language", "empty");
    if (detail::trim(fields[3]).empty()) reader.fail("query_text", "empty");
    dataset.items.push_back(
        {std::string(fields[3]), std::string(language), WordId{*word}, DefinitionId{*def}});
  }
  return dataset;
}

std::map<LanguageCode, EvalReport> run_labeled_eval(const Retriever& retriever,
                                                    const Lexicon& lexicon, const GroundTruth& gt,
                                                    const LabeledDataset& dataset,
                                                    const QueryEmbedder& embed,
                                                    const UnlabeledEvalConfig& cfg) {
  const std::size_t fetch = fetch_count(cfg);
  const IndexedPredicate indexed = [&](DefinitionId d) { return retriever.contains(d); };

  for (const auto& item : dataset.items) {
    const auto* def = lexicon.find_definition(item.target_definition);
    const auto where = "target word_id " + std::to_string(item.target_word.value) +
                       " / definition_id " + std::to_string(item.target_definition.value);
    if (lexicon.find_word(item.target_word) == nullptr || def == nullptr ||
        def->word_id != item.target_word) {
      throw Error(ErrorCode::kMissingTarget, where + " does not resolve in the lexicon");
    }
    const auto defs = lexicon.definitions_of(item.target_word);
    if (std::none_of(defs.begin(), defs.end(), indexed)) {
      throw Error(ErrorCode::kMissingTarget, where + " has no definition in the index");
    }
  }

  std::map<LanguageCode, EvalReport> reports;
  for (const auto& [language, positions] : dataset.by_language()) {
    std::vector<std::optional<JudgedQuery>> judged(positions.size());
    parallel_for(positions.size(), cfg.threads, [&](std::size_t q) {
      const auto& item = dataset.items[positions[q]];
      EmbeddingVector vector;
      try {
        vector = normalize(embed(item.query_text));
      } catch (const Error&) {
        return;  // counted as skipped below
      }
      const auto hits = retriever.retrieve(vector.values(), fetch);
      const auto words = dedup_hits_to_words(hits, cfg.candidates);

      JudgedQuery jq;
      jq.judgment.ranked.query_id = positions[q];
      for (const auto& wh : words) {
        jq.judgment.ranked.words.push_back(wh.word_id);
        if (wh.word_id == item.target_word) {
          jq.linked_sense_hit = wh.best.payload.definition_id == item.target_definition;
        }
      }
      jq.judgment.relevant = indexed_relevant_set(gt, item.target_word, lexicon, indexed);
      jq.rel_size = jq.judgment.relevant.size();
      judged[q] = std::move(jq);
    });

    std::vector<JudgedQuery> kept;
    for (auto& j : judged) {
      if (j) kept.push_back(std::move(*j));
    }
    const std::size_t skipped = positions.size() - kept.size();
    EvalReport report = kept.empty() ? empty_report(skipped) : aggregate(kept);
    report.skipped_queries = skipped;
    reports.emplace(language, std::move(report));
  }
  return reports;
}

}  // namespace sonahunt
