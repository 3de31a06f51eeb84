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

#include "sonahunt/service.hpp"

#include <chrono>
#include <string>
#include <vector>

#include <httplib.h>

#include "sonahunt/error.hpp"
#include "sonahunt/eval_runner.hpp"

namespace sonahunt {

namespace {

using nlohmann::json;

// Definition hits fetched per requested word before word deduplication.
constexpr std::size_t kFetchMultiplier = 5;

ServiceResponse error_response(int status, const std::string& error, const std::string& message) {
  return {status, json{{"error", error}, {"message", message}}};
}

ServiceResponse not_ready() { return error_response(503, "NotReady", "index is loading"); }

}  // namespace

void SearchService::set_ready(std::shared_ptr<const ServiceData> data) {
  std::lock_guard lock(mutex_);
  data_ = std::move(data);
}

std::shared_ptr<const ServiceData> SearchService::snapshot() const {
  std::lock_guard lock(mutex_);
  return data_;
}

ServiceResponse SearchService::handle_search(const std::string& body) const {
  json request;
  try {
    request = json::parse(body);
  } catch (const json::parse_error& e) {
    return error_response(400, "BadRequest", std::string("invalid JSON: ") + e.what());
  }
  return handle_search(request);
}

ServiceResponse SearchService::handle_search(const json& request) const {
  const auto started = std::chrono::steady_clock::now();
  if (!request.is_object()) return error_response(400, "BadRequest", "request must be a JSON object");

  const bool has_text = request.contains("query") && !request["query"].is_null();
  const bool has_vector = request.contains("query_vector") && !request["query_vector"].is_null();
  if (has_text == has_vector) {
    return error_response(400, "BadRequest", "exactly one of 'query' and 'query_vector' is required");
  }

  std::size_t limit = kDefaultSearchLimit;
  if (request.contains("limit")) {
    const auto& l = request["limit"];
    if (!l.is_number_integer() || l.get<std::int64_t>() < 1 ||
        l.get<std::int64_t>() > static_cast<std::int64_t>(kMaxSearchLimit)) {
      return error_response(400, "BadRequest", "'limit' must be an integer in [1, 100]");
    }
    limit = l.get<std::size_t>();
  }

  std::optional<std::string> language;
  if (request.contains("language") && !request["language"].is_null()) {
    if (!request["language"].is_string() || request["language"].get<std::string>().empty()) {
      return error_response(400, "BadRequest", "'language' must be a non-empty string");
    }
    language = request["language"].get<std::string>();
  }

  const auto data = snapshot();
  if (!data) return not_ready();

  EmbeddingVector query;
  if (has_text) {
    if (!request["query"].is_string() || request["query"].get<std::string>().empty()) {
      return error_response(400, "BadRequest", "'query' must be a non-empty string");
    }
    if (!data->word_vectors) {
      return error_response(422, "EmbeddingFailure",
                            "text queries are disabled: no word-vector table is configured");
    }
    try {
      query = embed_average(request["query"].get<std::string>(), *data->word_vectors);
    } catch (const Error& e) {
      return error_response(422, "EmbeddingFailure", e.what());
    }
  } else {
    const auto& raw = request["query_vector"];
    if (!raw.is_array() || raw.empty()) {
      return error_response(400, "BadRequest", "'query_vector' must be a non-empty array");
    }
    std::vector<float> comps;
    comps.reserve(raw.size());
    for (const auto& c : raw) {
      if (!c.is_number()) return error_response(400, "BadRequest", "'query_vector' must hold numbers");
      comps.push_back(c.get<float>());
    }
    try {
      query = normalize(EmbeddingVector(std::move(comps)));
    } catch (const Error& e) {
      return error_response(400, "BadRequest", e.what());
    }
  }
  if (!data->index.empty() && query.dim() != data->index.dim()) {
    return error_response(400, "BadRequest",
                          "query has dim " + std::to_string(query.dim()) + ", index dim " +
                              std::to_string(data->index.dim()));
  }

  PayloadFilter filter;
  if (language) filter = language_filter(*language);
  const auto hits = data->index.search(query.values(), limit * kFetchMultiplier,
                                       data->index.params().ef_search, filter);

  json out_hits = json::array();
  std::size_t rank = 0;
  for (const auto& wh : dedup_hits_to_words(hits, limit)) {
    const auto* word = data->lexicon.find_word(wh.word_id);
    const auto* def = data->lexicon.find_definition(wh.best.payload.definition_id);
    out_hits.push_back({{"rank", ++rank},
                        {"word_id", wh.word_id.value},
                        {"word_surface", word ? word->surface : std::string()},
                        {"score", wh.best.score},
                        {"matched_definition_id", wh.best.payload.definition_id.value},
                        {"matched_definition_text", def ? def->text : std::string()},
                        {"matched_definition_language", wh.best.payload.language}});
  }
  const double elapsed =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return {200, json{{"hits", std::move(out_hits)}, {"timing_ms", elapsed}}};
}

ServiceResponse SearchService::handle_word(std::uint64_t word_id) const {
  const auto data = snapshot();
  if (!data) return not_ready();
  const auto* word = data->lexicon.find_word(WordId{word_id});
  if (word == nullptr) {
    return error_response(404, "UnknownWord", "word_id " + std::to_string(word_id) + " not found");
  }
  json defs = json::array();
  for (const DefinitionId id : data->lexicon.definitions_of(word->id)) {
    const auto* d = data->lexicon.find_definition(id);
    defs.push_back({{"definition_id", d->id.value}, {"language", d->language}, {"text", d->text}});
  }
  json syns = json::array();
  for (const WordId id : data->lexicon.synonyms_of(word->id)) {
    const auto* s = data->lexicon.find_word(id);
    syns.push_back({{"word_id", id.value}, {"surface", s ? s->surface : std::string()}});
  }
  return {200, json{{"word_id", word->id.value},
                    {"surface", word->surface},
                    {"language", word->language},
                    {"definitions", std::move(defs)},
                    {"synonyms", std::move(syns)}}};
}

ServiceResponse SearchService::handle_health() const {
  const auto data = snapshot();
  if (!data) return {200, json{{"status", "loading"}}};
  return {200, json{{"status", "ok"},
                    {"points", data->index.size()},
                    {"dim", data->index.dim()},
                    {"definitions", data->lexicon.definitions().size()},
                    {"text_queries", data->word_vectors.has_value()}}};
}

void register_routes(httplib::Server& server, const SearchService& service,
                     const std::string& cors_origin) {
  const auto reply = [](httplib::Response& res, const ServiceResponse& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json; charset=utf-8");
  };

  server.set_default_headers({{"Access-Control-Allow-Origin", cors_origin},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
  server.Get("/api/health", [&service, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, service.handle_health());
  });
  server.Get(R"(/api/words/(\d+))",
             [&service, reply](const httplib::Request& req, httplib::Response& res) {
               std::uint64_t id = 0;
               try {
                 id = std::stoull(req.matches[1].str());
               } catch (const std::exception&) {
                 reply(res, error_response(404, "UnknownWord", "word id out of range"));
                 return;
               }
               reply(res, service.handle_word(id));
             });
  server.Post("/api/search", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.handle_search(req.body));
  });
}

}  // namespace sonahunt
