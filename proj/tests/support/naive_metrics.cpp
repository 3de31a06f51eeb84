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

#include "naive_metrics.hpp"

#include <algorithm>

namespace sonahunt::testing {

namespace {

bool hit(const NaiveJudgment& j, std::size_t pos) {
  return j.relevant.count(j.ranked[pos]) > 0;
}

}  // namespace

double naive_precision(const NaiveJudgment& j, std::size_t k) {
  double relevant = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (i < j.ranked.size() && hit(j, i)) relevant += 1;
  }
  return relevant / static_cast<double>(k);
}

double naive_ap(const NaiveJudgment& j) {
  double sum = 0;
  for (std::size_t i = 0; i < j.ranked.size(); ++i) {
    if (hit(j, i)) sum += naive_precision(j, i + 1);
  }
  return sum / static_cast<double>(j.rel_size);
}

double naive_rr(const NaiveJudgment& j) {
  for (std::size_t i = 0; i < j.ranked.size(); ++i) {
    if (hit(j, i)) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

std::size_t naive_rank(const NaiveJudgment& j, std::size_t cap) {
  for (std::size_t i = 0; i < j.ranked.size(); ++i) {
    if (hit(j, i)) return i + 1;
  }
  return cap;
}

double naive_accuracy(const NaiveJudgment& j, std::size_t k) {
  for (std::size_t i = 0; i < std::min(k, j.ranked.size()); ++i) {
    if (hit(j, i)) return 1.0;
  }
  return 0.0;
}

NaiveReport naive_aggregate(const std::vector<NaiveJudgment>& js) {
  auto mean = [&](auto metric) {
    double sum = 0;
    for (const auto& j : js) sum += metric(j);
    return sum / static_cast<double>(js.size());
  };
  NaiveReport r;
  r.map = mean([](const NaiveJudgment& j) { return naive_ap(j); });
  r.mp1 = mean([](const NaiveJudgment& j) { return naive_precision(j, 1); });
  r.mp10 = mean([](const NaiveJudgment& j) { return naive_precision(j, 10); });
  r.mrr = mean([](const NaiveJudgment& j) { return naive_rr(j); });
  r.acc1 = mean([](const NaiveJudgment& j) { return naive_accuracy(j, 1); });
  r.acc10 = mean([](const NaiveJudgment& j) { return naive_accuracy(j, 10); });
  std::vector<std::size_t> ranks;
  for (const auto& j : js) ranks.push_back(naive_rank(j));
  std::sort(ranks.begin(), ranks.end());
  r.median_rank = ranks[(ranks.size() - 1) / 2];
  return r;
}

}  // namespace sonahunt::testing
