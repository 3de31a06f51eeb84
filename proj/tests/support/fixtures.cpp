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

#include "fixtures.hpp"

#include <stdlib.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sonahunt::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  std::string pattern = (fs::temp_directory_path() / "sonahunt-test-XXXXXX").string();
  if (mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<float>> random_unit_vectors(std::size_t n, std::size_t dim,
                                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<std::vector<float>> out(n, std::vector<float>(dim));
  for (auto& v : out) {
    double norm = 0;
    std::vector<double> raw(dim);
    for (auto& x : raw) {
      x = gauss(rng);
      norm += x * x;
    }
    norm = std::sqrt(norm);
    for (std::size_t d = 0; d < dim; ++d) v[d] = static_cast<float>(raw[d] / norm);
  }
  return out;
}

std::vector<IndexedPoint> make_points(const std::vector<std::vector<float>>& vectors,
                                      const std::vector<std::string>& languages) {
  std::vector<IndexedPoint> points;
  points.reserve(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    points.push_back({EmbeddingVector(vectors[i]),
                      {DefinitionId(i + 1), WordId(i + 1), languages[i % languages.size()]}});
  }
  return points;
}

LexiconFiles write_pair_fixture(const fs::path& dir, std::size_t pairs, bool english_half) {
  std::ostringstream words, defs, syns;
  for (std::size_t p = 0; p < pairs; ++p) {
    const std::size_t a = 2 * p + 1;
    const std::size_t b = 2 * p + 2;
    const std::string lang_a = english_half ? "en" : "et";
    const std::string text = "pair " + std::to_string(p) + " shared meaning";
    words << a << '\t' << lang_a << "\tword" << a << '\n' << b << "\tet\tword" << b << '\n';
    defs << 100 + a << '\t' << a << '\t' << lang_a << '\t' << text << '\n'
         << 100 + b << '\t' << b << "\tet\t" << text << '\n';
    syns << a << '\t' << b << '\n';
  }
  LexiconFiles files{dir / "words.tsv", dir / "definitions.tsv", dir / "synonyms.tsv"};
  write_text(files.words, words.str());
  write_text(files.definitions, defs.str());
  write_text(files.synonyms, syns.str());
  return files;
}

RandomJudgment random_judgment(std::mt19937_64& rng, std::uint64_t query_id) {
  constexpr std::uint64_t kUniverse = 300;
  std::vector<std::uint64_t> universe(kUniverse);
  std::iota(universe.begin(), universe.end(), 1);
  std::shuffle(universe.begin(), universe.end(), rng);

  const std::size_t length = std::uniform_int_distribution<std::size_t>(0, 100)(rng);
  const std::size_t relevant = std::uniform_int_distribution<std::size_t>(1, 8)(rng);

  RandomJudgment out;
  out.naive.ranked.assign(universe.begin(), universe.begin() + length);
  // Relevant words are drawn from the whole universe so misses happen.
  for (std::size_t i = 0; i < relevant; ++i) {
    out.naive.relevant.insert(universe[std::uniform_int_distribution<std::size_t>(0, 2 * length + 10)(rng) % kUniverse]);
  }
  out.naive.rel_size = out.naive.relevant.size();

  out.library.judgment.ranked.query_id = query_id;
  for (auto w : out.naive.ranked) out.library.judgment.ranked.words.push_back(WordId(w));
  for (auto w : out.naive.relevant) out.library.judgment.relevant.insert(WordId(w));
  out.library.rel_size = out.naive.rel_size;
  return out;
}

}  // namespace sonahunt::testing
