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

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "naive_metrics.hpp"
#include "sonahunt/hnsw_index.hpp"
#include "sonahunt/metrics.hpp"

namespace sonahunt::testing {

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_bytes(const std::filesystem::path& path);

// Isotropic Gaussian directions, i.e. uniform on the unit sphere.
std::vector<std::vector<float>> random_unit_vectors(std::size_t n, std::size_t dim,
                                                    std::uint64_t seed);

// definition_id = i + 1, word_id = i + 1, language from `languages` cyclically.
std::vector<IndexedPoint> make_points(const std::vector<std::vector<float>>& vectors,
                                      const std::vector<std::string>& languages = {"et"});

struct LexiconFiles {
  std::filesystem::path words, definitions, synonyms;
};

// `pairs` synonym pairs. Words 2p+1 and 2p+2 share one definition text each
// ("pair p ..."), so hash embeddings of partners coincide. With `english_half`
// the first word of every pair and its definition are tagged "en".
LexiconFiles write_pair_fixture(const std::filesystem::path& dir, std::size_t pairs,
                                bool english_half = false);

struct RandomJudgment {
  JudgedQuery library;
  NaiveJudgment naive;
};

// Rankings of up to 100 distinct words out of a 300-word universe; the
// relevant set may contain words that were never retrieved.
RandomJudgment random_judgment(std::mt19937_64& rng, std::uint64_t query_id);

}  // namespace sonahunt::testing
