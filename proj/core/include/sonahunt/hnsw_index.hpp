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
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "sonahunt/embedding.hpp"
#include "sonahunt/types.hpp"

namespace sonahunt {

// Metadata stored next to every indexed vector and available to filters.
struct Payload {
  DefinitionId definition_id;
  WordId word_id;
  LanguageCode language;

  friend bool operator==(const Payload&, const Payload&) = default;
};

struct IndexedPoint {
  EmbeddingVector vector;  // unit length
  Payload payload;
};

struct HnswParams {
  std::size_t m = 16;                  // max links per node above layer 0; layer 0 allows 2m
  std::size_t ef_construction = 200;
  std::size_t ef_search = 128;
  std::uint64_t seed = 42;             // drives level sampling

  // Throws Error{kInvalidArgument} unless m >= 2, ef_construction >= m, ef_search >= 1.
  void validate() const;

  friend bool operator==(const HnswParams&, const HnswParams&) = default;
};

struct SearchHit {
  Payload payload;
  float score = 0.0f;  // cosine similarity

  friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

// Hits are ordered by descending score, ties by ascending definition id.
bool ranks_before(const SearchHit& a, const SearchHit& b);

// An empty filter accepts every point.
using PayloadFilter = std::function<bool(const Payload&)>;

PayloadFilter language_filter(LanguageCode language);

// Accepted deviation from unit norm for indexed vectors and queries.
inline constexpr double kNormTolerance = 1e-5;

// Result of a structural check of the graph; empty `violations` means sound.
struct GraphAudit {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Hierarchical navigable small-world graph over unit vectors, scored by inner
// product. Nodes are append-only. Once built the index is immutable and
// `search` may be called from any number of threads.
class HnswIndex {
 public:
  using NodeId = std::uint32_t;

  explicit HnswIndex(HnswParams params = {});
  ~HnswIndex();
  HnswIndex(HnswIndex&&) noexcept;
  HnswIndex& operator=(HnswIndex&&) noexcept;
  HnswIndex(const HnswIndex&) = delete;
  HnswIndex& operator=(const HnswIndex&) = delete;

  // Inserts `points` in order. Deterministic for a fixed seed and order.
  // Throws Error{kDimMismatch | kDuplicateDefinitionId | kUnnormalizedVector}.
  static HnswIndex build(std::span<const IndexedPoint> points, HnswParams params = {});

  // Single-writer append; not safe concurrently with search.
  void add(const IndexedPoint& point);

  // Top-k by cosine. `ef` is raised to at least k; with a filter it is
  // multiplied by 4 and the filter is applied while expanding layer 0, so
  // rejected nodes still route the traversal. Returns nothing on an empty
  // index. Throws Error{kDimMismatch}, Error{kInvalidArgument} for k == 0.
  std::vector<SearchHit> search(std::span<const float> query, std::size_t k, std::size_t ef,
                                const PayloadFilter& filter = {}) const;
  std::vector<SearchHit> search(std::span<const float> query, std::size_t k) const {
    return search(query, k, params_.ef_search);
  }

  const HnswParams& params() const { return params_; }
  std::size_t size() const { return payloads_.size(); }
  bool empty() const { return payloads_.empty(); }
  std::size_t dim() const { return dim_; }
  int max_level() const { return max_level_; }
  NodeId entry_point() const { return entry_point_; }

  int level(NodeId node) const { return levels_[node]; }
  const Payload& payload(NodeId node) const { return payloads_[node]; }
  std::span<const float> vector(NodeId node) const {
    return {vectors_.data() + static_cast<std::size_t>(node) * dim_, dim_};
  }
  std::span<const NodeId> neighbors(NodeId node, int level) const;

  // Degree bounds, edge validity, layer nesting and per-layer reachability
  // from the entry point.
  GraphAudit audit() const;

  // Versioned binary format, see hnsw_index.cpp. Throws Error{kIoFailure}.
  void save(const std::filesystem::path& path) const;
  // Throws Error{kVersionMismatch} on a foreign magic or version byte and
  // Error{kIoFailure} on truncation.
  static HnswIndex load(const std::filesystem::path& path);

 private:
  struct Scored;
  struct VisitedPool;
  struct SearchScratch;

  std::size_t max_links(int level) const { return level == 0 ? 2 * params_.m : params_.m; }
  std::span<NodeId> mutable_links(NodeId node, int level);
  void set_links(NodeId node, int level, std::span<const NodeId> links);
  int sample_level(std::size_t ordinal) const;
  float similarity(std::span<const float> query, NodeId node) const;

  NodeId greedy_descend(std::span<const float> query, NodeId start, int from_level, int to_level) const;
  std::vector<Scored> search_layer(std::span<const float> query, NodeId entry, std::size_t ef,
                                   int level, const PayloadFilter& filter) const;
  std::vector<NodeId> select_neighbors(std::span<const float> base, std::vector<Scored> candidates,
                                       std::size_t limit) const;
  void connect(NodeId node, NodeId neighbor, int level);

  HnswParams params_;
  std::size_t dim_ = 0;
  std::vector<float> vectors_;
  std::vector<Payload> payloads_;
  std::vector<int> levels_;
  // Layer 0: fixed stride of 1 + 2m slots per node, slot 0 holds the count.
  std::vector<NodeId> base_links_;
  // Layers >= 1: per node, level blocks of 1 + m slots each.
  std::vector<std::vector<NodeId>> upper_links_;
  NodeId entry_point_ = 0;
  int max_level_ = -1;
  std::unordered_set<DefinitionId> definition_ids_;
  std::unique_ptr<VisitedPool> visited_;
};

// Exact top-k by cosine over `points`, with the same ordering and filter
// semantics as HnswIndex::search. Reference for recall measurements.
std::vector<SearchHit> brute_force_search(std::span<const IndexedPoint> points,
                                          std::span<const float> query, std::size_t k,
                                          const PayloadFilter& filter = {});

// |ids(approx[0..k)) ∩ ids(exact[0..k))| / k.
double recall_at_k(std::span<const SearchHit> approx, std::span<const SearchHit> exact, std::size_t k);

}  // namespace sonahunt
