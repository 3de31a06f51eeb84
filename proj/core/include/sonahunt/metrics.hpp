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
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "sonahunt/ground_truth.hpp"
#include "sonahunt/types.hpp"

namespace sonahunt {

// Items returned per query.
inline constexpr std::size_t kResultLimit = 100;
// Rank assigned to a query whose results contain nothing relevant.
inline constexpr std::size_t kMissRank = 1000;
// Cutoffs reported for MP@k and Acc@k.
inline constexpr std::size_t kReportedCutoffs[] = {1, 10};

// Word-level ranking for one query, best first, without duplicates.
struct RankedResult {
  std::uint64_t query_id = 0;
  std::vector<WordId> words;
};

struct QueryJudgment {
  RankedResult ranked;
  WordSet relevant;
};

// |relevant among the first min(k, |Res|) items| / k. Short lists are not
// renormalized.
double precision_at_k(const QueryJudgment& j, std::size_t k);

// (1 / rel_size) * Σ over relevant positions i of P@i.
double average_precision(const QueryJudgment& j, std::size_t rel_size);

// 1 / rank of the first relevant item, 0 when none is retrieved.
double reciprocal_rank(const QueryJudgment& j);

// Rank of the first relevant item, or `cap` when none is retrieved.
std::size_t first_relevant_rank_capped(const QueryJudgment& j, std::size_t cap = kMissRank);

// 1 if any of the first k items is relevant.
int accuracy_at_k(const QueryJudgment& j, std::size_t k);

struct JudgedQuery {
  QueryJudgment judgment;
  std::size_t rel_size = 1;  // |Rel| for average precision
  // Labeled protocol only: whether the best-scoring definition of the target
  // word was the linked sense. Unset when the target word was not retrieved.
  std::optional<bool> linked_sense_hit;
};

struct PerQueryRecord {
  std::uint64_t query_id = 0;
  double average_precision = 0.0;
  double reciprocal_rank = 0.0;
  std::size_t first_relevant_rank = kMissRank;

  friend bool operator==(const PerQueryRecord&, const PerQueryRecord&) = default;
};

struct EvalReport {
  double map = 0.0;
  std::map<std::size_t, double> mp_at;
  double mrr = 0.0;
  std::map<std::size_t, double> acc_at;
  std::size_t median_rank = kMissRank;
  std::size_t query_count = 0;
  std::vector<PerQueryRecord> per_query;
  // Auxiliary, labeled protocol: share of queries retrieving the target word
  // whose best definition for it was the linked sense.
  std::optional<double> linked_sense_rate;
  std::size_t skipped_queries = 0;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Means of per-query AP, P@k, RR and Acc@k, and the lower median of the
// capped first-relevant ranks. Means are summed in sorted order so the result
// does not depend on query order. Throws Error{kEmptyJudgments}.
EvalReport aggregate(std::span<const JudgedQuery> judgments);

}  // namespace sonahunt
