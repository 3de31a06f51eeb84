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

#include <cmath>
#include <random>
#include <vector>

#include "sonahunt/hnsw_index.hpp"

namespace sonahunt::bench {

inline std::vector<float> unit_vector(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<float> gauss;
  std::vector<float> v(dim);
  double norm = 0;
  for (auto& x : v) {
    x = gauss(rng);
    norm += static_cast<double>(x) * x;
  }
  for (auto& x : v) x = static_cast<float>(x / std::sqrt(norm));
  return v;
}

inline std::vector<IndexedPoint> unit_points(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<IndexedPoint> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    points.push_back({EmbeddingVector(unit_vector(rng, dim)),
                      {DefinitionId(i + 1), WordId(i / 2 + 1), i % 4 == 0 ? "en" : "et"}});
  }
  return points;
}

}  // namespace sonahunt::bench
