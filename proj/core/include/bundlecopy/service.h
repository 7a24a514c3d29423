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

#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "bundlecopy/pipeline.h"

namespace bundlecopy {

struct HttpReply {
  int status = 200;
  std::string body;  // JSON
};

/// JSON-over-HTTP front end over loaded artifacts.
///   GET  /health        -> {version, artifacts}
///   GET  /topics        -> {topics}
///   POST /combinations  {topic, n, seed?}            -> {combinations: [{products, score, pattern}]}
///   POST /copywriting   {product_ids, beam?, seed?}  -> {copy, approved, verdict, score}
///   POST /assess        {product_ids, copy}          -> {verdict}
/// Errors are {"error": {"code", "message"}} with a 4xx status.
class Service {
 public:
  Service(const Artifacts& artifacts, PipelineConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Transport-free dispatch; used by the HTTP handlers and by tests.
  HttpReply handle(std::string_view method, std::string_view path, std::string_view body) const;

  // Binds and returns the port (pass 0 for an ephemeral one); throws on failure.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Loads artifacts, binds and serves until the process is stopped.
void serve(const PipelineConfig& config, const std::string& host, int port);

}  // namespace bundlecopy
