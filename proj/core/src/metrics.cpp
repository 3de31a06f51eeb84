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

#include "sonahunt/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "sonahunt/error.hpp"

namespace sonahunt {

namespace {

bool is_relevant(const QueryJudgment& j, std::size_t position) {
  return j.relevant.contains(j.ranked.words[position]);
}

double sorted_mean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const double sum = std::accumulate(values.begin(), values.end(), 0.0);
  return sum / static_cast<double>(values.size());
}

}  // namespace

double precision_at_k(const QueryJudgment& j, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "precision cutoff must be >= 1");
  const std::size_t n = std::min(k, j.ranked.words.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) hits += is_relevant(j, i) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(k);
}

double average_precision(const QueryJudgment& j, std::size_t rel_size) {
  if (rel_size == 0) throw Error(ErrorCode::kInvalidArgument, "rel_size must be >= 1");
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < j.ranked.words.size(); ++i) {
    if (!is_relevant(j, i)) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(i + 1);
  }
  return sum / static_cast<double>(rel_size);
}

double reciprocal_rank(const QueryJudgment& j) {
  for (std::size_t i = 0; i < j.ranked.words.size(); ++i) {
    if (is_relevant(j, i)) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

std::size_t first_relevant_rank_capped(const QueryJudgment& j, std::size_t cap) {
  for (std::size_t i = 0; i < j.ranked.words.size() && i + 1 < cap; ++i) {
    if (is_relevant(j, i)) return i + 1;
  }
  return cap;
}

int accuracy_at_k(const QueryJudgment& j, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "accuracy cutoff must be >= 1");
  const std::size_t n = std::min(k, j.ranked.words.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (is_relevant(j, i)) return 1;
  }
  return 0;
}

EvalReport aggregate(std::span<const JudgedQuery> judgments) {
  if (judgments.empty()) throw Error(ErrorCode::kEmptyJudgments, "no queries to aggregate");

  const std::size_t n = judgments.size();
  std::vector<double> ap(n), rr(n);
  std::map<std::size_t, std::vector<double>> precision, accuracy;
  std::vector<std::size_t> ranks(n);
  std::size_t sense_seen = 0, sense_hit = 0;

  EvalReport report;
  report.query_count = n;
  report.per_query.reserve(n);
  for (std::size_t q = 0; q < n; ++q) {
    const auto& jq = judgments[q];
    ap[q] = average_precision(jq.judgment, jq.rel_size);
    rr[q] = reciprocal_rank(jq.judgment);
    ranks[q] = first_relevant_rank_capped(jq.judgment);
    for (const std::size_t k : kReportedCutoffs) {
      precision[k].push_back(precision_at_k(jq.judgment, k));
      accuracy[k].push_back(static_cast<double>(accuracy_at_k(jq.judgment, k)));
    }
    if (jq.linked_sense_hit) {
      ++sense_seen;
      sense_hit += *jq.linked_sense_hit ? 1 : 0;
    }
    report.per_query.push_back({jq.judgment.ranked.query_id, ap[q], rr[q], ranks[q]});
  }

  report.map = sorted_mean(std::move(ap));
  report.mrr = sorted_mean(std::move(rr));
  for (const std::size_t k : kReportedCutoffs) {
    report.mp_at[k] = sorted_mean(std::move(precision[k]));
    report.acc_at[k] = sorted_mean(std::move(accuracy[k]));
  }
  std::sort(ranks.begin(), ranks.end());
  report.median_rank = ranks[(n - 1) / 2];
  if (sense_seen > 0) {
    report.linked_sense_rate = static_cast<double>(sense_hit) / static_cast<double>(sense_seen);
  }

  // P@1 and Acc@1 coincide query by query, hence also in the mean.
  if (report.acc_at.at(1) != report.mp_at.at(1)) {
    throw std::logic_error("Acc@1 differs from MP@1");
  }
  return report;
}

}  // namespace sonahunt
