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
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <json.hpp>

#include "sonahunt/embedding.hpp"
#include "sonahunt/hnsw_index.hpp"
#include "sonahunt/lexicon.hpp"

namespace httplib {
class Server;
}

namespace sonahunt {

// Everything the service reads; shared immutably between handlers.
struct ServiceData {
  HnswIndex index;
  Lexicon lexicon;
  std::optional<WordVectorTable> word_vectors;  // enables text queries
};

struct ServiceResponse {
  int status = 200;
  nlohmann::json body;
};

inline constexpr std::size_t kDefaultSearchLimit = 10;
inline constexpr std::size_t kMaxSearchLimit = 100;

// Request handlers of the reverse-dictionary API, independent of transport.
// Until `set_ready` is called search and word lookups answer 503.
class SearchService {
 public:
  SearchService() = default;
  explicit SearchService(std::shared_ptr<const ServiceData> data) { set_ready(std::move(data)); }

  void set_ready(std::shared_ptr<const ServiceData> data);
  bool ready() const { return snapshot() != nullptr; }

  // POST /api/search
  //   {"query": str | "query_vector": [float], "language"?: str, "limit"?: 1..100}
  // 400 on a malformed request, 422 when a text query cannot be embedded.
  ServiceResponse handle_search(const std::string& body) const;
  ServiceResponse handle_search(const nlohmann::json& request) const;
  // GET /api/words/{id}
  ServiceResponse handle_word(std::uint64_t word_id) const;
  // GET /api/health
  ServiceResponse handle_health() const;

 private:
  std::shared_ptr<const ServiceData> snapshot() const;

  mutable std::mutex mutex_;
  std::shared_ptr<const ServiceData> data_;
};

// Binds the API routes and CORS headers onto an httplib server.
void register_routes(httplib::Server& server, const SearchService& service,
                     const std::string& cors_origin = "*");

}  // namespace sonahunt
