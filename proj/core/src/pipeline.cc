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

#include "bundlecopy/pipeline.h"

#include <algorithm>
#include <chrono>

#include "bundlecopy/common.h"
#include "bundlecopy/lm/checkpoint.h"
#include "json.hpp"

namespace bundlecopy {

using nlohmann::json;

namespace {

std::filesystem::path resolve(const json& j, const char* key, const std::filesystem::path& base, bool required) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    if (required) throw Error(std::string("pipeline config: missing '") + key + "'");
    return {};
  }
  std::filesystem::path p = it->get<std::string>();
  return p.is_relative() && !base.empty() ? base / p : p;
}

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw Error(std::string("stage '") + name + "': " + e.what());
  }
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::string checksum_of(const std::filesystem::path& p) { return hex64(fnv1a64(read_file(p))); }

}  // namespace

PipelineConfig PipelineConfig::parse(std::string_view json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(std::string("pipeline config: ") + e.what());
  }
  PipelineConfig c;
  try {
    c.catalog = resolve(j, "catalog", base_dir, true);
    c.topic_rules = resolve(j, "topic_rules", base_dir, false);
    c.patterns = resolve(j, "patterns", base_dir, true);
    c.lexicon = resolve(j, "lexicon", base_dir, true);
    c.word_model = resolve(j, "word_model", base_dir, true);
    c.strict_arbitrator = resolve(j, "strict_arbitrator", base_dir, true);
    c.checkpoint = resolve(j, "checkpoint", base_dir, true);
    if (j.contains("strict_threshold")) c.strict_threshold = j.at("strict_threshold").get<double>();
    if (auto e = j.find("enhancement"); e != j.end()) {
      c.enhancement.min_per_product = e->value("min_per_product", c.enhancement.min_per_product);
      c.enhancement.top_k = e->value("top_k", c.enhancement.top_k);
      c.enhancement.min_extra_tokens = e->value("min_extra_tokens", c.enhancement.min_extra_tokens);
    }
    if (auto d = j.find("decode"); d != j.end()) {
      c.decode.beam_size = d->value("beam_size", c.decode.beam_size);
      c.decode.max_output_len = d->value("max_output_len", c.decode.max_output_len);
      c.decode.length_alpha = d->value("length_alpha", c.decode.length_alpha);
    }
    c.words_per_product = j.value("words_per_product", c.words_per_product);
    c.seed = j.value("seed", c.seed);
    c.retries = j.value("retries", c.retries);
  } catch (const json::exception& e) {
    throw Error(std::string("pipeline config: ") + e.what());
  }
  if (c.decode.beam_size < 1) throw Error("pipeline config: beam_size must be >= 1");
  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  return parse(read_file(path), path.parent_path());
}

std::string PipelineConfig::serialize() const {
  json j{{"catalog", catalog.string()},
         {"patterns", patterns.string()},
         {"lexicon", lexicon.string()},
         {"word_model", word_model.string()},
         {"strict_arbitrator", strict_arbitrator.string()},
         {"checkpoint", checkpoint.string()},
         {"enhancement",
          {{"min_per_product", enhancement.min_per_product},
           {"top_k", enhancement.top_k},
           {"min_extra_tokens", enhancement.min_extra_tokens}}},
         {"decode",
          {{"beam_size", decode.beam_size},
           {"max_output_len", decode.max_output_len},
           {"length_alpha", decode.length_alpha}}},
         {"words_per_product", words_per_product},
         {"seed", seed},
         {"retries", retries}};
  if (!topic_rules.empty()) j["topic_rules"] = topic_rules.string();
  if (strict_threshold) j["strict_threshold"] = *strict_threshold;
  return j.dump(2) + "\n";
}

Artifacts Artifacts::load(const PipelineConfig& config) {
  Artifacts a;
  auto products = stage("load catalog", [&] { return load_catalog(config.catalog); });
  a.checksums["catalog"] = checksum_of(config.catalog);
  if (!config.topic_rules.empty()) {
    const auto rules = stage("load topic rules", [&] { return load_topic_rules(config.topic_rules); });
    products = assign_topics(std::move(products), rules);
    a.checksums["topic_rules"] = checksum_of(config.topic_rules);
  }
  a.words = stage("load word model", [&] { return ProductWordModel::load(config.word_model); });
  a.checksums["word_model"] = checksum_of(config.word_model);
  a.catalog = Catalog(annotate_product_words(a.words, std::move(products)));
  a.slots.emplace(a.catalog, a.words);
  a.patterns = stage("load patterns", [&] { return PatternTable::load(config.patterns); });
  a.checksums["patterns"] = checksum_of(config.patterns);
  a.lexicon = stage("load lexicon", [&] { return ForbiddenLexicon::load(config.lexicon); });
  a.checksums["lexicon"] = checksum_of(config.lexicon);
  a.strict = stage("load strict arbitrator", [&] { return ArbitratorModel::load(config.strict_arbitrator); });
  if (a.strict.variant() != ArbitratorVariant::strict) {
    throw Error("stage 'load strict arbitrator': model is not the strict variant");
  }
  a.checksums["strict_arbitrator"] = checksum_of(config.strict_arbitrator);
  auto ck = stage("load checkpoint", [&] { return lm::load_checkpoint(config.checkpoint); });
  a.model = std::move(ck.model);
  a.vocab = std::move(ck.vocab);
  a.checksums["checkpoint"] = checksum_of(config.checkpoint);
  return a;
}

Combination combination_from_ids(const Catalog& catalog, std::span<const std::string> ids) {
  Combination c;
  c.products.assign(ids.begin(), ids.end());
  c.provenance = Provenance::dataset;
  if (c.products.size() < 2) throw Error("a combination needs at least 2 products");
  for (const auto& id : c.products) {
    if (!catalog.find(id)) throw Error("unknown product id '" + id + "'");
  }
  const Product& first = catalog.at(c.products.front());
  c.topic = first.topic.value_or(std::string(kUnassignedTopic));
  validate(c);
  return c;
}

CopyResult generate_copy(const Artifacts& artifacts, const PipelineConfig& config, const Combination& combo,
                         std::optional<std::size_t> retries) {
  const lm::EncodeOptions encode{config.words_per_product, static_cast<std::size_t>(artifacts.model.config.max_len)};
  const std::size_t max_attempts = 1 + retries.value_or(config.retries);
  CopyResult out;
  out.score = artifacts.strict.score(combo, artifacts.catalog);
  Combination ordered = combo;
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    if (attempt > 0) {
      std::rotate(ordered.products.begin(), ordered.products.begin() + 1, ordered.products.end());
    }
    const auto prefix = lm::encode_prefix(ordered, artifacts.catalog, artifacts.vocab, encode);
    const auto hyp = lm::generate_beam(artifacts.model, prefix, config.decode);
    const std::string text = artifacts.vocab.decode(lm::strip_eos(hyp));
    Assessment a = assess_copy(text, combo, artifacts.catalog, artifacts.lexicon, artifacts.words, config.enhancement);
    out.copy = std::move(a.text);
    out.verdict = std::move(a.verdict);
    out.attempts = attempt + 1;
    if (out.verdict.approved) break;
  }
  return out;
}

std::vector<PipelineResult> run_pipeline(const Artifacts& artifacts, const PipelineConfig& config,
                                         std::string_view topic, std::size_t n) {
  if (n == 0) return {};
  auto t0 = std::chrono::steady_clock::now();
  const auto candidates = stage("select", [&] {
    return select_pattern(artifacts.catalog, *artifacts.slots, artifacts.patterns, topic, n, config.seed);
  });
  const double select_ms = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  const double threshold = config.strict_threshold.value_or(artifacts.strict.threshold());
  const auto accepted = stage("filter", [&] {
    return filter_combinations(artifacts.strict, candidates, artifacts.catalog, threshold);
  });
  const double filter_ms = ms_since(t0);

  std::vector<PipelineResult> results;
  for (const auto& combo : accepted) {
    PipelineResult r;
    r.combination = combo;
    r.timings.select_ms = select_ms;
    r.timings.filter_ms = filter_ms;
    t0 = std::chrono::steady_clock::now();
    const CopyResult c = stage("generate", [&] { return generate_copy(artifacts, config, combo); });
    // generate_copy already assesses each attempt to drive retries; the final
    // verdict is re-derived below so the enhancement stage is timed on its own.
    r.timings.generate_ms = ms_since(t0);
    t0 = std::chrono::steady_clock::now();
    const Assessment check = stage("enhance", [&] {
      return assess_copy(c.copy, combo, artifacts.catalog, artifacts.lexicon, artifacts.words, config.enhancement);
    });
    r.timings.enhance_ms = ms_since(t0);
    r.score = c.score;
    r.copy = c.copy;
    r.verdict = check.verdict;
    r.attempts = c.attempts;
    results.push_back(std::move(r));
  }
  return results;
}

std::string serialize_result(const PipelineResult& r) {
  json pattern = nullptr;
  if (r.combination.pattern) {
    pattern = json::array();
    for (const auto& s : *r.combination.pattern) pattern.push_back({s.cid, s.word});
  }
  json j{{"products", r.combination.products},
         {"topic", r.combination.topic},
         {"pattern", pattern},
         {"score", r.score},
         {"copy", r.copy},
         {"attempts", r.attempts},
         {"verdict",
          {{"forbidden", to_string(r.verdict.forbidden)},
           {"coverage", r.verdict.coverage},
           {"creative", r.verdict.creative},
           {"approved", r.verdict.approved},
           {"reason", r.verdict.reason}}},
         {"timings_ms",
          {{"select", r.timings.select_ms},
           {"filter", r.timings.filter_ms},
           {"generate", r.timings.generate_ms},
           {"enhance", r.timings.enhance_ms}}}};
  return j.dump();
}

}  // namespace bundlecopy
