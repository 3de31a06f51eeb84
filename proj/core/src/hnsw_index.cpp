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

#include "sonahunt/hnsw_index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <queue>
#include <string>
#include <utility>

#include "binary_io.hpp"
#include "sonahunt/error.hpp"
#include "sonahunt/vector_ops.hpp"

namespace sonahunt {

// Index file, little-endian, version 1:
//
//   magic "HNSW" | version: u8 = 1
//   m: u32 | ef_construction: u32 | ef_search: u32 | seed: u64
//   dim: u32 | count: u64 | entry_point: u32 | max_level: i32
//   vectors:   count x dim x f32
//   payloads:  count x (definition_id: u64, word_id: u64, lang_len: u8, lang bytes)
//   levels:    count x u8
//   adjacency: for each node, for level 0..level(node): degree: u32, degree x u32
namespace {

constexpr char kIndexMagic[4] = {'H', 'N', 'S', 'W'};
constexpr std::uint8_t kIndexVersion = 1;
constexpr int kMaxLevel = 31;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

struct HnswIndex::Scored {
  float sim;
  NodeId node;
};

namespace {

template <class S>
bool better(const S& a, const S& b) {
  return a.sim > b.sim || (a.sim == b.sim && a.node < b.node);
}

template <class S>
struct BetterFirst {
  bool operator()(const S& a, const S& b) const { return better(b, a); }
};

template <class S>
struct WorseFirst {
  bool operator()(const S& a, const S& b) const { return better(a, b); }
};

class VisitedList {
 public:
  void reset(std::size_t n) {
    if (marks_.size() < n) marks_.resize(n, 0);
    if (++tag_ == 0) {
      std::fill(marks_.begin(), marks_.end(), 0);
      tag_ = 1;
    }
  }
  // True if `i` was already visited in this round.
  bool test_and_set(std::size_t i) {
    if (marks_[i] == tag_) return true;
    marks_[i] = tag_;
    return false;
  }

 private:
  std::vector<std::uint16_t> marks_;
  std::uint16_t tag_ = 0;
};

}  // namespace

struct HnswIndex::VisitedPool {
  std::mutex mutex;
  std::vector<std::unique_ptr<VisitedList>> free;

  std::unique_ptr<VisitedList> acquire() {
    std::lock_guard lock(mutex);
    if (free.empty()) return std::make_unique<VisitedList>();
    auto list = std::move(free.back());
    free.pop_back();
    return list;
  }
  void release(std::unique_ptr<VisitedList> list) {
    std::lock_guard lock(mutex);
    free.push_back(std::move(list));
  }
};

void HnswParams::validate() const {
  if (m < 2) throw Error(ErrorCode::kInvalidArgument, "m must be >= 2");
  if (ef_construction < m) throw Error(ErrorCode::kInvalidArgument, "ef_construction must be >= m");
  if (ef_search < 1) throw Error(ErrorCode::kInvalidArgument, "ef_search must be >= 1");
}

bool ranks_before(const SearchHit& a, const SearchHit& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.payload.definition_id < b.payload.definition_id;
}

PayloadFilter language_filter(LanguageCode language) {
  return [lang = std::move(language)](const Payload& p) { return p.language == lang; };
}

HnswIndex::HnswIndex(HnswParams params)
    : params_(params), visited_(std::make_unique<VisitedPool>()) {
  params_.validate();
}

HnswIndex::~HnswIndex() = default;
HnswIndex::HnswIndex(HnswIndex&&) noexcept = default;
HnswIndex& HnswIndex::operator=(HnswIndex&&) noexcept = default;

HnswIndex HnswIndex::build(std::span<const IndexedPoint> points, HnswParams params) {
  HnswIndex index(params);
  if (!points.empty()) {
    const std::size_t dim = points.front().vector.dim();
    for (const auto& p : points) {
      if (p.vector.dim() != dim) {
        throw Error(ErrorCode::kDimMismatch, "definition_id " +
                                                 std::to_string(p.payload.definition_id.value) +
                                                 " has dim " + std::to_string(p.vector.dim()) +
                                                 ", expected " + std::to_string(dim));
      }
    }
    index.vectors_.reserve(points.size() * dim);
    index.payloads_.reserve(points.size());
    index.levels_.reserve(points.size());
    index.base_links_.reserve(points.size() * (1 + 2 * params.m));
    index.upper_links_.reserve(points.size());
  }
  for (const auto& p : points) index.add(p);
  return index;
}

std::span<const HnswIndex::NodeId> HnswIndex::neighbors(NodeId node, int level) const {
  const NodeId* block = nullptr;
  if (level == 0) {
    block = base_links_.data() + static_cast<std::size_t>(node) * (1 + 2 * params_.m);
  } else {
    block = upper_links_[node].data() + static_cast<std::size_t>(level - 1) * (1 + params_.m);
  }
  return {block + 1, block[0]};
}

std::span<HnswIndex::NodeId> HnswIndex::mutable_links(NodeId node, int level) {
  NodeId* block = nullptr;
  if (level == 0) {
    block = base_links_.data() + static_cast<std::size_t>(node) * (1 + 2 * params_.m);
  } else {
    block = upper_links_[node].data() + static_cast<std::size_t>(level - 1) * (1 + params_.m);
  }
  return {block, 1 + max_links(level)};
}

void HnswIndex::set_links(NodeId node, int level, std::span<const NodeId> links) {
  auto block = mutable_links(node, level);
  block[0] = static_cast<NodeId>(links.size());
  std::copy(links.begin(), links.end(), block.begin() + 1);
}

int HnswIndex::sample_level(std::size_t ordinal) const {
  const std::uint64_t bits = splitmix64(params_.seed ^ splitmix64(ordinal));
  const double u = static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;  // (0, 1]
  const double scale = 1.0 / std::log(static_cast<double>(params_.m));
  const double level = std::floor(-std::log(u) * scale);
  return static_cast<int>(std::min(level, static_cast<double>(kMaxLevel)));
}

float HnswIndex::similarity(std::span<const float> query, NodeId node) const {
  return dot(query, vector(node));
}

HnswIndex::NodeId HnswIndex::greedy_descend(std::span<const float> query, NodeId start,
                                            int from_level, int to_level) const {
  NodeId current = start;
  float current_sim = similarity(query, current);
  for (int level = from_level; level >= to_level; --level) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const NodeId n : neighbors(current, level)) {
        const float s = similarity(query, n);
        if (s > current_sim || (s == current_sim && n < current)) {
          current = n;
          current_sim = s;
          changed = true;
        }
      }
    }
  }
  return current;
}

std::vector<HnswIndex::Scored> HnswIndex::search_layer(std::span<const float> query, NodeId entry,
                                                       std::size_t ef, int level,
                                                       const PayloadFilter& filter) const {
  auto visited = visited_->acquire();
  visited->reset(size());

  std::priority_queue<Scored, std::vector<Scored>, BetterFirst<Scored>> candidates;
  std::priority_queue<Scored, std::vector<Scored>, WorseFirst<Scored>> results;

  const Scored start{similarity(query, entry), entry};
  visited->test_and_set(entry);
  candidates.push(start);
  if (!filter || filter(payloads_[entry])) results.push(start);

  while (!candidates.empty()) {
    const Scored current = candidates.top();
    if (results.size() >= ef && better(results.top(), current)) break;
    candidates.pop();

    for (const NodeId n : neighbors(current.node, level)) {
      if (visited->test_and_set(n)) continue;
      const Scored next{similarity(query, n), n};
      if (results.size() < ef || better(next, results.top())) {
        candidates.push(next);
        if (!filter || filter(payloads_[n])) {
          results.push(next);
          if (results.size() > ef) results.pop();
        }
      }
    }
  }
  visited_->release(std::move(visited));

  std::vector<Scored> out(results.size());
  for (auto it = out.rbegin(); it != out.rend(); ++it) {
    *it = results.top();
    results.pop();
  }
  return out;
}

std::vector<HnswIndex::NodeId> HnswIndex::select_neighbors(std::span<const float> /*base*/,
                                                           std::vector<Scored> candidates,
                                                           std::size_t limit) const {
  std::sort(candidates.begin(), candidates.end(), [](const Scored& a, const Scored& b) { return better(a, b); });
  std::vector<NodeId> selected;
  selected.reserve(limit);
  if (candidates.size() <= limit) {
    for (const auto& c : candidates) selected.push_back(c.node);
    return selected;
  }
  // Keep a candidate only if it is closer to the base than to every neighbor
  // kept so far; this favors links that point in different directions.
  for (const auto& c : candidates) {
    if (selected.size() >= limit) break;
    bool diverse = true;
    for (const NodeId kept : selected) {
      if (dot(vector(c.node), vector(kept)) > c.sim) {
        diverse = false;
        break;
      }
    }
    if (diverse) selected.push_back(c.node);
  }
  return selected;
}

void HnswIndex::connect(NodeId node, NodeId neighbor, int level) {
  auto block = mutable_links(node, level);
  const std::size_t degree = block[0];
  if (degree < max_links(level)) {
    block[1 + degree] = neighbor;
    block[0] = static_cast<NodeId>(degree + 1);
    return;
  }
  const auto base = vector(node);
  std::vector<Scored> pool;
  pool.reserve(degree + 1);
  for (std::size_t i = 0; i < degree; ++i) {
    const NodeId n = block[1 + i];
    pool.push_back({dot(base, vector(n)), n});
  }
  pool.push_back({dot(base, vector(neighbor)), neighbor});
  const auto kept = select_neighbors(base, std::move(pool), max_links(level));
  set_links(node, level, kept);
}

void HnswIndex::add(const IndexedPoint& point) {
  const auto& v = point.vector;
  if (empty() && dim_ == 0) {
    dim_ = v.dim();
  } else if (v.dim() != dim_) {
    throw Error(ErrorCode::kDimMismatch, "point has dim " + std::to_string(v.dim()) +
                                             ", index dim " + std::to_string(dim_));
  }
  if (std::abs(v.norm() - 1.0) > kNormTolerance) {
    throw Error(ErrorCode::kUnnormalizedVector,
                "definition_id " + std::to_string(point.payload.definition_id.value) +
                    " has norm " + std::to_string(v.norm()));
  }
  if (definition_ids_.contains(point.payload.definition_id)) {
    throw Error(ErrorCode::kDuplicateDefinitionId,
                "definition_id " + std::to_string(point.payload.definition_id.value));
  }
  if (size() >= std::numeric_limits<NodeId>::max()) {
    throw Error(ErrorCode::kInvalidArgument, "index is full");
  }

  const auto node = static_cast<NodeId>(size());
  const int node_level = sample_level(node);
  definition_ids_.insert(point.payload.definition_id);
  vectors_.insert(vectors_.end(), v.values().begin(), v.values().end());
  payloads_.push_back(point.payload);
  levels_.push_back(node_level);
  base_links_.resize(base_links_.size() + 1 + 2 * params_.m, 0);
  upper_links_.emplace_back(static_cast<std::size_t>(node_level) * (1 + params_.m), 0);

  if (max_level_ < 0) {
    entry_point_ = node;
    max_level_ = node_level;
    return;
  }

  const auto query = vector(node);
  NodeId entry = entry_point_;
  if (node_level < max_level_) entry = greedy_descend(query, entry, max_level_, node_level + 1);

  for (int level = std::min(node_level, max_level_); level >= 0; --level) {
    auto found = search_layer(query, entry, params_.ef_construction, level, {});
    entry = found.front().node;
    const auto chosen = select_neighbors(query, std::move(found), params_.m);
    set_links(node, level, chosen);
    for (const NodeId n : chosen) connect(n, node, level);
  }

  if (node_level > max_level_) {
    entry_point_ = node;
    max_level_ = node_level;
  }
}

std::vector<SearchHit> HnswIndex::search(std::span<const float> query, std::size_t k,
                                         std::size_t ef, const PayloadFilter& filter) const {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be positive");
  if (empty()) return {};
  if (query.size() != dim_) {
    throw Error(ErrorCode::kDimMismatch, "query has dim " + std::to_string(query.size()) +
                                             ", index dim " + std::to_string(dim_));
  }
  std::size_t effective_ef = std::max(ef, k);
  if (filter) effective_ef *= 4;

  const NodeId entry = greedy_descend(query, entry_point_, max_level_, 1);
  const auto found = search_layer(query, entry, effective_ef, 0, filter);

  std::vector<SearchHit> hits;
  hits.reserve(found.size());
  for (const auto& s : found) hits.push_back({payloads_[s.node], s.sim});
  std::sort(hits.begin(), hits.end(), ranks_before);
  if (hits.size() > k) hits.resize(k);
  return hits;
}

GraphAudit HnswIndex::audit() const {
  GraphAudit report;
  auto& v = report.violations;
  const auto n = static_cast<NodeId>(size());
  if (n == 0) return report;

  if (entry_point_ >= n) v.push_back("entry point out of range");
  else if (levels_[entry_point_] != max_level_) v.push_back("entry point is not on the top level");

  for (NodeId node = 0; node < n; ++node) {
    if (levels_[node] > max_level_) {
      v.push_back("node " + std::to_string(node) + " above max level");
    }
    for (int level = 0; level <= levels_[node]; ++level) {
      const auto links = neighbors(node, level);
      if (links.size() > max_links(level)) {
        v.push_back("node " + std::to_string(node) + " exceeds degree bound on level " +
                    std::to_string(level));
        continue;
      }
      std::vector<NodeId> sorted(links.begin(), links.end());
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        v.push_back("node " + std::to_string(node) + " has duplicate links on level " +
                    std::to_string(level));
      }
      for (const NodeId to : links) {
        if (to >= n) {
          v.push_back("node " + std::to_string(node) + " links out of range");
        } else if (to == node) {
          v.push_back("node " + std::to_string(node) + " links to itself");
        } else if (levels_[to] < level) {
          v.push_back("node " + std::to_string(node) + " links to node " + std::to_string(to) +
                      " which is absent from level " + std::to_string(level));
        }
      }
    }
  }
  if (!v.empty()) return report;

  std::vector<int> seen(n, -1);
  for (int level = max_level_; level >= 0; --level) {
    std::size_t expected = 0;
    for (NodeId node = 0; node < n; ++node) expected += levels_[node] >= level ? 1 : 0;
    std::vector<NodeId> stack{entry_point_};
    seen[entry_point_] = level;
    std::size_t reached = 0;
    while (!stack.empty()) {
      const NodeId cur = stack.back();
      stack.pop_back();
      ++reached;
      for (const NodeId to : neighbors(cur, level)) {
        if (seen[to] != level) {
          seen[to] = level;
          stack.push_back(to);
        }
      }
    }
    if (reached != expected) {
      v.push_back("level " + std::to_string(level) + ": " + std::to_string(expected - reached) +
                  " of " + std::to_string(expected) + " nodes unreachable from the entry point");
    }
  }
  return report;
}

void HnswIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());

  out.write(kIndexMagic, sizeof(kIndexMagic));
  detail::write_pod(out, kIndexVersion);
  detail::write_pod(out, static_cast<std::uint32_t>(params_.m));
  detail::write_pod(out, static_cast<std::uint32_t>(params_.ef_construction));
  detail::write_pod(out, static_cast<std::uint32_t>(params_.ef_search));
  detail::write_pod(out, params_.seed);
  detail::write_pod(out, static_cast<std::uint32_t>(dim_));
  detail::write_pod(out, static_cast<std::uint64_t>(size()));
  detail::write_pod(out, static_cast<std::uint32_t>(entry_point_));
  detail::write_pod(out, static_cast<std::int32_t>(max_level_));

  detail::write_span(out, std::span<const float>(vectors_));
  for (const auto& p : payloads_) {
    detail::write_pod(out, p.definition_id.value);
    detail::write_pod(out, p.word_id.value);
    detail::write_pod(out, static_cast<std::uint8_t>(p.language.size()));
    out.write(p.language.data(), static_cast<std::streamsize>(p.language.size()));
  }
  for (const int level : levels_) detail::write_pod(out, static_cast<std::uint8_t>(level));
  for (NodeId node = 0; node < size(); ++node) {
    for (int level = 0; level <= levels_[node]; ++level) {
      const auto links = neighbors(node, level);
      detail::write_pod(out, static_cast<std::uint32_t>(links.size()));
      detail::write_span(out, links);
    }
  }
  if (!out) throw Error(ErrorCode::kIoFailure, "short write to " + path.string());
}

HnswIndex HnswIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  const auto truncated = [&]() {
    return Error(ErrorCode::kIoFailure, path.string() + ": truncated index file");
  };

  char magic[4] = {};
  std::uint8_t version = 0;
  if (!in.read(magic, sizeof(magic)) || !detail::read_pod(in, version)) throw truncated();
  if (std::string_view(magic, 4) != std::string_view(kIndexMagic, 4)) {
    throw Error(ErrorCode::kVersionMismatch, path.string() + ": not an HNSW index file");
  }
  if (version != kIndexVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                path.string() + ": index format version " + std::to_string(version) +
                    ", expected " + std::to_string(kIndexVersion));
  }

  std::uint32_t m = 0, ef_construction = 0, ef_search = 0, dim = 0, entry = 0;
  std::uint64_t seed = 0, count = 0;
  std::int32_t max_level = 0;
  if (!detail::read_pod(in, m) || !detail::read_pod(in, ef_construction) ||
      !detail::read_pod(in, ef_search) || !detail::read_pod(in, seed) || !detail::read_pod(in, dim) ||
      !detail::read_pod(in, count) || !detail::read_pod(in, entry) || !detail::read_pod(in, max_level)) {
    throw truncated();
  }
  HnswIndex index(HnswParams{m, ef_construction, ef_search, seed});
  const auto file_size = std::filesystem::file_size(path);
  if (count > file_size || (dim > 0 && count * dim * sizeof(float) > file_size)) throw truncated();

  index.dim_ = dim;
  index.entry_point_ = entry;
  index.max_level_ = max_level;
  index.vectors_.resize(count * dim);
  if (!detail::read_span(in, std::span<float>(index.vectors_))) throw truncated();

  index.payloads_.resize(count);
  for (auto& p : index.payloads_) {
    std::uint8_t lang_len = 0;
    if (!detail::read_pod(in, p.definition_id.value) || !detail::read_pod(in, p.word_id.value) ||
        !detail::read_pod(in, lang_len)) {
      throw truncated();
    }
    p.language.resize(lang_len);
    if (!in.read(p.language.data(), lang_len)) throw truncated();
    if (!index.definition_ids_.insert(p.definition_id).second) {
      throw Error(ErrorCode::kDuplicateDefinitionId, path.string() + ": duplicate definition_id " +
                                                         std::to_string(p.definition_id.value));
    }
  }

  index.levels_.resize(count);
  for (auto& level : index.levels_) {
    std::uint8_t raw = 0;
    if (!detail::read_pod(in, raw)) throw truncated();
    level = raw;
  }

  index.base_links_.assign(count * (1 + 2 * index.params_.m), 0);
  index.upper_links_.resize(count);
  std::vector<NodeId> links;
  for (NodeId node = 0; node < count; ++node) {
    index.upper_links_[node].assign(static_cast<std::size_t>(index.levels_[node]) * (1 + m), 0);
    for (int level = 0; level <= index.levels_[node]; ++level) {
      std::uint32_t degree = 0;
      if (!detail::read_pod(in, degree)) throw truncated();
      if (degree > index.max_links(level)) {
        throw Error(ErrorCode::kIoFailure, path.string() + ": degree bound exceeded");
      }
      links.resize(degree);
      if (!detail::read_span(in, std::span<NodeId>(links))) throw truncated();
      index.set_links(node, level, links);
    }
  }
  if (count > 0 && (entry >= count || max_level < 0)) {
    throw Error(ErrorCode::kIoFailure, path.string() + ": corrupt header");
  }
  if (count == 0) index.max_level_ = -1;
  return index;
}

std::vector<SearchHit> brute_force_search(std::span<const IndexedPoint> points,
                                          std::span<const float> query, std::size_t k,
                                          const PayloadFilter& filter) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be positive");
  std::vector<SearchHit> top;
  top.reserve(k + 1);
  // Heap ordered so the worst retained hit sits at the front.
  for (const auto& p : points) {
    if (p.vector.dim() != query.size()) {
      throw Error(ErrorCode::kDimMismatch, "query has dim " + std::to_string(query.size()) +
                                               ", point dim " + std::to_string(p.vector.dim()));
    }
    if (filter && !filter(p.payload)) continue;
    const float score = dot(query, p.vector.values());
    if (top.size() < k) {
      top.push_back({p.payload, score});
      std::push_heap(top.begin(), top.end(), ranks_before);
      continue;
    }
    const auto& worst = top.front();
    if (score < worst.score ||
        (score == worst.score && p.payload.definition_id > worst.payload.definition_id)) {
      continue;
    }
    std::pop_heap(top.begin(), top.end(), ranks_before);
    top.back() = SearchHit{p.payload, score};
    std::push_heap(top.begin(), top.end(), ranks_before);
  }
  std::sort(top.begin(), top.end(), ranks_before);
  return top;
}

double recall_at_k(std::span<const SearchHit> approx, std::span<const SearchHit> exact, std::size_t k) {
  if (k == 0) return 0.0;
  std::unordered_set<DefinitionId> truth;
  for (std::size_t i = 0; i < std::min(k, exact.size()); ++i) truth.insert(exact[i].payload.definition_id);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < std::min(k, approx.size()); ++i) {
    hit += truth.contains(approx[i].payload.definition_id) ? 1 : 0;
  }
  return static_cast<double>(hit) / static_cast<double>(k);
}

}  // namespace sonahunt
