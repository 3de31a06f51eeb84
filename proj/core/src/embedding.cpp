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

#include "sonahunt/embedding.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "binary_io.hpp"
#include "sonahunt/error.hpp"
#include "sonahunt/vector_ops.hpp"
#include "text_util.hpp"

namespace sonahunt {

namespace {

constexpr char kEmbeddingMagic[4] = {'E', 'M', 'B', '1'};

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Uniform in (0, 1].
double unit_open(std::uint64_t& state) {
  return static_cast<double>((splitmix64(state) >> 11) + 1) * 0x1.0p-53;
}

std::vector<std::string_view> whitespace_tokens(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  };
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) tokens.push_back(text.substr(start, i - start));
  }
  return tokens;
}

}  // namespace

EmbeddingVector::EmbeddingVector(std::vector<float> components) : components_(std::move(components)) {
  if (components_.empty()) throw Error(ErrorCode::kInvalidArgument, "empty vector");
  for (const float c : components_) {
    if (!std::isfinite(c)) throw Error(ErrorCode::kInvalidArgument, "non-finite vector component");
  }
}

double EmbeddingVector::norm() const {
  double sum = 0.0;
  for (const float c : components_) sum += static_cast<double>(c) * c;
  return std::sqrt(sum);
}

EmbeddingVector normalize(const EmbeddingVector& v) {
  const double n = v.norm();
  if (!(n > 0.0)) throw Error(ErrorCode::kZeroVector, "cannot normalize a zero vector");
  std::vector<float> out(v.dim());
  const auto in = v.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(in[i] / n);
  return EmbeddingVector(std::move(out));
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::kDimMismatch, "cosine of vectors with different dims");
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) throw Error(ErrorCode::kZeroVector, "cosine with a zero vector");
  return static_cast<double>(dot(a.values(), b.values())) / (na * nb);
}

void WordVectorTable::insert(std::string token, EmbeddingVector v) {
  if (v.dim() != dim_) {
    throw Error(ErrorCode::kDimMismatch, "token '" + token + "' has dim " + std::to_string(v.dim()) +
                                             ", table dim " + std::to_string(dim_));
  }
  vocabulary_.insert_or_assign(std::move(token), std::move(v));
}

const EmbeddingVector* WordVectorTable::find(std::string_view token) const {
  const auto it = vocabulary_.find(std::string(token));
  return it == vocabulary_.end() ? nullptr : &it->second;
}

WordVectorTable load_word_vectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());

  const auto fail = [&](std::size_t line_no, const std::string& why) -> Error {
    return Error(ErrorCode::kMalformedRecord, path.string() + ":" + std::to_string(line_no) + ": " + why);
  };

  std::string line;
  if (!std::getline(in, line)) throw fail(1, "missing header");
  const auto header = whitespace_tokens(line);
  if (header.size() != 2) throw fail(1, "header must be '<vocab_size> <dim>'");
  const auto vocab = detail::parse_u64(header[0]);
  const auto dim = detail::parse_u64(header[1]);
  if (!vocab || !dim || *dim == 0) throw fail(1, "header must be '<vocab_size> <dim>'");

  WordVectorTable table(*dim);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = whitespace_tokens(line);
    if (fields.empty()) continue;
    if (fields.size() != *dim + 1) {
      throw Error(ErrorCode::kDimMismatch, path.string() + ":" + std::to_string(line_no) +
                                               ": expected " + std::to_string(*dim) + " components");
    }
    std::vector<float> comps(*dim);
    for (std::size_t i = 0; i < *dim; ++i) {
      const auto f = fields[i + 1];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), comps[i]);
      if (ec != std::errc{} || ptr != f.data() + f.size()) throw fail(line_no, "bad component");
    }
    table.insert(std::string(fields[0]), EmbeddingVector(std::move(comps)));
  }
  if (table.size() != *vocab) {
    throw fail(line_no, "header announces " + std::to_string(*vocab) + " tokens, found " +
                            std::to_string(table.size()));
  }
  return table;
}

EmbeddingVector embed_average(std::string_view text, const WordVectorTable& table) {
  std::vector<double> sum(table.dim(), 0.0);
  std::size_t found = 0;
  for (const auto token : whitespace_tokens(text)) {
    const auto* v = table.find(token);
    if (v == nullptr) continue;
    const auto values = v->values();
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += values[i];
    ++found;
  }
  if (found == 0) {
    throw Error(ErrorCode::kAllTokensOutOfVocabulary,
                "no token of '" + std::string(text.substr(0, 80)) + "' is in the vocabulary");
  }
  std::vector<float> mean(sum.size());
  for (std::size_t i = 0; i < sum.size(); ++i) {
    mean[i] = static_cast<float>(sum[i] / static_cast<double>(found));
  }
  return normalize(EmbeddingVector(std::move(mean)));
}

EmbeddingVector hash_embedder(std::string_view text, std::size_t dim, std::uint64_t seed) {
  if (dim < 2) throw Error(ErrorCode::kInvalidArgument, "hash embedder needs dim >= 2");
  std::uint64_t mix = seed;
  std::uint64_t state = fnv1a(text) ^ splitmix64(mix);
  std::vector<float> out(dim);
  // Box-Muller, two Gaussians per pair of uniforms.
  for (std::size_t i = 0; i < dim; i += 2) {
    const double r = std::sqrt(-2.0 * std::log(unit_open(state)));
    const double theta = 2.0 * std::numbers::pi * unit_open(state);
    out[i] = static_cast<float>(r * std::cos(theta));
    if (i + 1 < dim) out[i + 1] = static_cast<float>(r * std::sin(theta));
  }
  return normalize(EmbeddingVector(std::move(out)));
}

void EmbeddingSet::add(DefinitionId id, EmbeddingVector v) {
  if (v.dim() != dim_) {
    throw Error(ErrorCode::kDimMismatch, "definition_id " + std::to_string(id.value) + " has dim " +
                                             std::to_string(v.dim()) + ", set dim " +
                                             std::to_string(dim_));
  }
  if (!by_id_.emplace(id, entries_.size()).second) {
    throw Error(ErrorCode::kDuplicateDefinitionId,
                "definition_id " + std::to_string(id.value) + " appears twice");
  }
  entries_.emplace_back(id, std::move(v));
}

const EmbeddingVector* EmbeddingSet::find(DefinitionId id) const {
  const auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &entries_[it->second].second;
}

void write_embedding_set(const EmbeddingSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out.write(kEmbeddingMagic, sizeof(kEmbeddingMagic));
  detail::write_pod(out, static_cast<std::uint32_t>(set.dim()));
  detail::write_pod(out, static_cast<std::uint64_t>(set.size()));
  for (const auto& [id, v] : set.entries()) {
    detail::write_pod(out, id.value);
    detail::write_span(out, v.values());
  }
  if (!out) throw Error(ErrorCode::kIoFailure, "short write to " + path.string());
}

EmbeddingSet load_embedding_set(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  const auto file_size = std::filesystem::file_size(path);

  char magic[4] = {};
  if (!in.read(magic, sizeof(magic))) throw Error(ErrorCode::kTruncatedFile, path.string() + ": no header");
  if (std::string_view(magic, 4) != std::string_view(kEmbeddingMagic, 4)) {
    throw Error(ErrorCode::kBadMagic, path.string() + ": not an EMB1 file");
  }
  std::uint32_t dim = 0;
  std::uint64_t count = 0;
  if (!detail::read_pod(in, dim) || !detail::read_pod(in, count)) {
    throw Error(ErrorCode::kTruncatedFile, path.string() + ": short header");
  }
  if (dim == 0) throw Error(ErrorCode::kDimMismatch, path.string() + ": header dim is 0");

  constexpr std::uint64_t kHeader = 4 + 4 + 8;
  const std::uint64_t record = 8 + 4ULL * dim;
  const std::uint64_t payload = file_size - kHeader;
  if (count > payload / record) {
    throw Error(ErrorCode::kTruncatedFile, path.string() + ": header announces " +
                                               std::to_string(count) + " records, file holds " +
                                               std::to_string(payload / record));
  }
  if (payload != count * record) {
    throw Error(ErrorCode::kDimMismatch,
                path.string() + ": trailing bytes do not match dim " + std::to_string(dim));
  }

  EmbeddingSet set(dim, path.stem().string());
  std::vector<float> buf(dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint64_t id = 0;
    if (!detail::read_pod(in, id) || !detail::read_span(in, std::span<float>(buf))) {
      throw Error(ErrorCode::kTruncatedFile, path.string() + ": record " + std::to_string(i));
    }
    set.add(DefinitionId{id}, EmbeddingVector(buf));
  }
  return set;
}

}  // namespace sonahunt
