// Copyright 2026 The bundlecopy Authors. All Rights Reserved.
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

#include "bundlecopy/service.h"

#include <sys/socket.h>

#include <cstdio>

#include "bundlecopy/common.h"
#include "httplib.h"
#include "json.hpp"

namespace bundlecopy {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxCombinations = 100;
constexpr std::size_t kMaxBeam = 16;

struct RequestError {
  int status;
  std::string code;
  std::string message;
};

HttpReply error_reply(int status, const std::string& code, const std::string& message) {
  return {status, json{{"error", {{"code", code}, {"message", message}}}}.dump()};
}

json parse_body(std::string_view body) {
  json j = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw RequestError{400, "bad_json", "request body is not valid JSON"};
  if (!j.is_object()) throw RequestError{400, "bad_request", "request body must be a JSON object"};
  return j;
}

template <typename T>
T field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw RequestError{400, "bad_request", std::string("missing field '") + key + "'"};
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw RequestError{400, "bad_request", std::string("field '") + key + "' has the wrong type"};
  }
}

template <typename T>
T optional_field(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw RequestError{400, "bad_request", std::string("field '") + key + "' has the wrong type"};
  }
}

json verdict_json(const Verdict& v) {
  return {{"forbidden", to_string(v.forbidden)},
          {"coverage", v.coverage},
          {"creative", v.creative},
          {"approved", v.approved},
          {"reason", v.reason}};
}

json pattern_json(const std::optional<PatternKey>& key) {
  if (!key) return nullptr;
  json out = json::array();
  for (const auto& s : *key) out.push_back({{"cid", s.cid}, {"word", s.word}});
  return out;
}

}  // namespace

struct Service::Impl {
  const Artifacts& artifacts;
  PipelineConfig config;
  httplib::Server server;

  Combination combo_from(const json& body) const {
    const auto ids = field<std::vector<std::string>>(body, "product_ids");
    if (ids.size() < 2) throw RequestError{400, "bad_request", "product_ids needs at least 2 ids"};
    for (const auto& id : ids) {
      if (!artifacts.catalog.find(id)) throw RequestError{404, "unknown_product", "unknown product id '" + id + "'"};
    }
    try {
      return combination_from_ids(artifacts.catalog, ids);
    } catch (const Error& e) {
      throw RequestError{400, "bad_request", e.what()};
    }
  }

  json health() const {
    return {{"version", std::string(kVersion)}, {"artifacts", artifacts.checksums}};
  }

  json topics() const { return {{"topics", artifacts.patterns.topics()}}; }

  json combinations(const json& body) const {
    const auto topic = field<std::string>(body, "topic");
    const auto n = field<std::size_t>(body, "n");
    if (n > kMaxCombinations) {
      throw RequestError{400, "bad_request", "n must be at most " + std::to_string(kMaxCombinations)};
    }
    if (artifacts.patterns.patterns(topic).empty()) {
      throw RequestError{404, "unknown_topic", "no patterns for topic '" + topic + "'"};
    }
    const auto seed = optional_field<std::uint64_t>(body, "seed", config.seed);
    const double threshold = config.strict_threshold.value_or(artifacts.strict.threshold());
    std::vector<Combination> picked;
    try {
      picked = select_pattern(artifacts.catalog, *artifacts.slots, artifacts.patterns, topic, n, seed);
    } catch (const Error& e) {
      throw RequestError{422, "unsatisfiable", e.what()};
    }
    json list = json::array();
    for (const auto& c : picked) {
      const double score = artifacts.strict.score(c, artifacts.catalog);
      if (score < threshold) continue;
      list.push_back({{"products", c.products}, {"score", score}, {"pattern", pattern_json(c.pattern)}});
    }
    return {{"combinations", list}};
  }

  json copywriting(const json& body) const {
    Combination combo = combo_from(body);
    const auto beam = optional_field<std::size_t>(body, "beam", config.decode.beam_size);
    if (beam < 1 || beam > kMaxBeam) {
      throw RequestError{400, "bad_request", "beam must lie in [1, " + std::to_string(kMaxBeam) + "]"};
    }
    if (auto seed = optional_field<std::int64_t>(body, "seed", -1); seed >= 0) {
      Rng rng(static_cast<std::uint64_t>(seed));
      rng.shuffle(combo.products);
    }
    PipelineConfig c = config;
    c.decode.beam_size = beam;
    const CopyResult r = generate_copy(artifacts, c, combo);
    return {{"copy", r.copy},
            {"approved", r.verdict.approved},
            {"verdict", verdict_json(r.verdict)},
            {"score", r.score},
            {"products", combo.products}};
  }

  json assess(const json& body) const {
    const Combination combo = combo_from(body);
    const auto copy = field<std::string>(body, "copy");
    if (copy.empty()) throw RequestError{400, "bad_request", "copy must be non-empty"};
    const Assessment a =
        assess_copy(copy, combo, artifacts.catalog, artifacts.lexicon, artifacts.words, config.enhancement);
    return {{"verdict", verdict_json(a.verdict)}, {"copy", a.text}};
  }
};

Service::Service(const Artifacts& artifacts, PipelineConfig config)
    : impl_(new Impl{artifacts, std::move(config), {}}) {
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    const HttpReply r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json; charset=utf-8");
  };
  // Every method reaches handle() so wrong verbs get a JSON 405.
  for (const char* path : {"/health", "/topics", "/combinations", "/copywriting", "/assess"}) {
    impl_->server.Get(path, route);
    impl_->server.Post(path, route);
    impl_->server.Put(path, route);
    impl_->server.Delete(path, route);
  }
  // No SO_REUSEPORT: a second server on a taken port must fail to bind.
  impl_->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  impl_->server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const HttpReply r = error_reply(res.status, res.status == 404 ? "not_found" : "http_error", "request failed");
    res.set_content(r.body, "application/json; charset=utf-8");
  });
}

Service::~Service() = default;

HttpReply Service::handle(std::string_view method, std::string_view path, std::string_view body) const {
  try {
    if (method == "GET" && path == "/health") return {200, impl_->health().dump()};
    if (method == "GET" && path == "/topics") return {200, impl_->topics().dump()};
    if (method == "POST" && path == "/combinations") return {200, impl_->combinations(parse_body(body)).dump()};
    if (method == "POST" && path == "/copywriting") return {200, impl_->copywriting(parse_body(body)).dump()};
    if (method == "POST" && path == "/assess") return {200, impl_->assess(parse_body(body)).dump()};
    if (path == "/health" || path == "/topics" || path == "/combinations" || path == "/copywriting" ||
        path == "/assess") {
      return error_reply(405, "method_not_allowed", std::string(method) + " not allowed on " + std::string(path));
    }
    return error_reply(404, "not_found", "no route for " + std::string(path));
  } catch (const RequestError& e) {
    return error_reply(e.status, e.code, e.message);
  } catch (const Error& e) {
    return error_reply(422, "unprocessable", e.what());
  }
}

int Service::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw Error("serve: cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void Service::listen() {
  if (!impl_->server.listen_after_bind()) throw Error("serve: listener stopped with an error");
}

void Service::stop() { impl_->server.stop(); }

void serve(const PipelineConfig& config, const std::string& host, int port) {
  const Artifacts artifacts = Artifacts::load(config);
  Service service(artifacts, config);
  const int bound = service.bind(host, port);
  std::fprintf(stderr, "bundlecopy %s listening on %s:%d\n", std::string(kVersion).c_str(), host.c_str(), bound);
  service.listen();
}

}  // namespace bundlecopy
